#pragma once

// Monte-Carlo harness: interpolation sweeps over the soft geometric models
// and empirical checks of the moment formulas and normal limits.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sgof/inference.hpp"
#include "sgof/models.hpp"
#include "sgof/moments.hpp"
#include "sgof/morse.hpp"
#include "sgof/rng.hpp"
#include "sgof/subcomplex.hpp"

namespace sgof {

// ---------------------------------------------------------------------------
// worker pool

// Number of workers: explicit value if positive, else SGOF_THREADS, else the
// hardware concurrency.
inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("SGOF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls task(i) for i in [0, count) on `threads` workers. Tasks write to
// their own slots, so the outcome does not depend on the schedule.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// summary statistics

struct MeanEstimate {
  double mean = 0;
  double se = 0;
};

inline MeanEstimate mean_with_stderr(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double m = 0;
  for (double v : x) m += v;
  m /= n;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double var = x.size() > 1 ? ss / (n - 1) : 0.0;
  return {m, std::sqrt(var / n)};
}

// Unbiased sample variance and the standard error of that estimator,
// sqrt((m4 - s^4 (n-3)/(n-1)) / n).
inline MeanEstimate variance_with_stderr(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double m = 0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0, m4 = 0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  const double s2 = m2 / (n - 1);
  m4 /= n;
  const double var_s2 = (m4 - s2 * s2 * (n - 3) / (n - 1)) / n;
  return {s2, std::sqrt(std::max(var_s2, 0.0))};
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// sup_x |F_n(x) - Phi(x)|
inline double ks_distance_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = standard_normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepPoint {
  double eps1;
  double eps2;
  // row of the full grid; keys the replicate seeds so a subset of rows
  // reproduces the same samples as the full sweep
  std::optional<std::size_t> id;
};

struct SweepSpec {
  GeometricModel model = GeometricModel::edge;
  std::vector<SweepPoint> grid;
  std::size_t reps = 50;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<GofStatistic> statistics{GofStatistic::critical, GofStatistic::triangle};
  bool diagonal_sigma = false;
  std::optional<std::size_t> k_prime;

  void validate() const {
    if (reps < 1) throw std::invalid_argument("reps must be at least 1");
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (statistics.empty()) throw std::invalid_argument("no statistic requested");
    for (const auto& g : grid)
      if (!(g.eps1 >= 0 && g.eps1 <= g.eps2))
        throw std::invalid_argument("grid point needs 0 <= eps1 <= eps2");
  }
};

enum class Outcome : std::uint8_t { pass, reject, inconclusive };

struct SweepRow {
  std::size_t grid_index;
  SweepPoint point;
  GofStatistic statistic;
  std::size_t passes = 0;
  std::size_t rejects = 0;
  std::size_t inconclusive = 0;
  std::size_t reps = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double inconclusive_fraction() const {
    std::size_t inc = 0, total = 0;
    for (const auto& r : rows) {
      inc += r.inconclusive;
      total += r.reps;
    }
    return total ? static_cast<double>(inc) / static_cast<double>(total) : 0.0;
  }
};

// Sample one replicate of a grid point and run every requested test.
inline std::vector<Outcome> sweep_replicate(const SweepSpec& spec, std::size_t grid_index, std::size_t rep) {
  const SweepPoint& pt = spec.grid[grid_index];
  const ModelSetup setup = geometric_model(spec.model, pt.eps1, pt.eps2);
  const Seed seed = derive_seed(spec.seed, pt.id.value_or(grid_index), rep);
  const auto sample = sample_soft_geometric(setup.n, setup.ambient_dim, setup.kernel, seed);
  GofOptions opt;
  opt.alpha = spec.alpha;
  opt.diagonal_sigma = spec.diagonal_sigma;
  opt.k_prime = spec.k_prime;
  std::vector<Outcome> out;
  for (GofStatistic stat : spec.statistics) {
    const GofResult r = run_gof(stat, sample.second, static_cast<int>(setup.fit_dimension), opt);
    out.push_back(r.inconclusive ? Outcome::inconclusive : r.reject ? Outcome::reject : Outcome::pass);
  }
  return out;
}

inline SweepResult run_sweep(const SweepSpec& spec, int threads = 0,
                             const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  spec.validate();
  const std::size_t tasks = spec.grid.size() * spec.reps;
  std::vector<std::vector<Outcome>> outcomes(tasks);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(tasks, resolve_threads(threads), [&](std::size_t t) {
    outcomes[t] = sweep_replicate(spec, t / spec.reps, t % spec.reps);
    const std::size_t d = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(d, tasks);
    }
  });
  SweepResult result;
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    for (std::size_t s = 0; s < spec.statistics.size(); ++s) {
      SweepRow row{spec.grid[g].id.value_or(g), spec.grid[g], spec.statistics[s]};
      row.reps = spec.reps;
      for (std::size_t r = 0; r < spec.reps; ++r) {
        switch (outcomes[g * spec.reps + r][s]) {
          case Outcome::pass: ++row.passes; break;
          case Outcome::reject: ++row.rejects; break;
          case Outcome::inconclusive: ++row.inconclusive; break;
        }
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const SweepResult& result) {
  out << "eps1,eps2,statistic,passes,reps,rejects,inconclusive,model,grid_index,alpha,seed\n";
  for (const auto& r : result.rows)
    out << format_real(r.point.eps1) << ',' << format_real(r.point.eps2) << ',' << to_string(r.statistic) << ','
        << r.passes << ',' << r.reps << ',' << r.rejects << ',' << r.inconclusive << ',' << to_string(spec.model)
        << ',' << r.grid_index << ',' << format_real(spec.alpha) << ',' << spec.seed << '\n';
}

// ---------------------------------------------------------------------------
// verification

enum class TargetKind {
  critical_mean,
  critical_variance,
  critical_correlation,  // empirical correlation of T_{k'+i+1}, T_{k'+j+1} vs sigma_inf(i, j)
  critical_ks,           // standardised T_{k+1} against N(0, 1)
  mle_mean,              // p_hat_i against p_i
  mle_ks,                // sqrt(C(n,i+1) P_i)(p_hat_i - p_i) / sqrt(p_i(1-p_i)) against N(0, 1)
  pattern_mean,          // T_L against E[T_L]
};

inline std::string to_string(TargetKind k) {
  switch (k) {
    case TargetKind::critical_mean: return "critical_mean";
    case TargetKind::critical_variance: return "critical_variance";
    case TargetKind::critical_correlation: return "critical_correlation";
    case TargetKind::critical_ks: return "critical_ks";
    case TargetKind::mle_mean: return "mle_mean";
    case TargetKind::mle_ks: return "mle_ks";
    case TargetKind::pattern_mean: return "pattern_mean";
  }
  return "?";
}

inline TargetKind parse_target(const std::string& s) {
  for (TargetKind k : {TargetKind::critical_mean, TargetKind::critical_variance, TargetKind::critical_correlation,
                       TargetKind::critical_ks, TargetKind::mle_mean, TargetKind::mle_ks, TargetKind::pattern_mean})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown verification target '" + s + "'");
}

struct VerificationTarget {
  TargetKind kind;
  ModelParams params;
  long long k = 1;  // size parameter, component index i, or p index
  long long j = 2;  // second component index for correlations
  std::optional<PatternComplex> pattern;
};

struct VerificationEntry {
  std::string name;
  double formula_value = 0;
  double mc_estimate = 0;
  double mc_stderr = 0;
  double z_score = 0;
  double ks = std::numeric_limits<double>::quiet_NaN();
  std::size_t reps = 0;
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;
};

namespace detail {

inline double z_of(double est, double formula, double se) {
  if (se > 0) return (est - formula) / se;
  return est == formula ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), est - formula);
}

}  // namespace detail

// Every target draws `reps` samples from its own stream, derived from
// (seed, target index, replicate).
inline VerificationEntry verify_target(const VerificationTarget& t, std::size_t index, std::size_t reps,
                                       std::uint64_t seed, unsigned threads) {
  VerificationEntry e;
  e.reps = reps;
  const ModelParams& p = t.params;
  const long long kp = static_cast<long long>(p.k_prime());
  std::vector<double> x(reps), y(reps);

  auto sample = [&](std::size_t r) { return sample_multiparameter(p, derive_seed(seed, index, r)); };
  auto crit_of = [&](const SimplicialComplex& c, long long size) {
    return static_cast<double>(critical_counts(c, static_cast<std::size_t>(size))[static_cast<std::size_t>(size)]);
  };

  switch (t.kind) {
    case TargetKind::critical_mean:
    case TargetKind::critical_variance:
    case TargetKind::critical_ks: {
      parallel_for(reps, threads, [&](std::size_t r) { x[r] = crit_of(sample(r), t.k + 1); });
      const double mean = static_cast<double>(critical_mean_exact(p, t.k));
      const double var = static_cast<double>(critical_variance_exact(p, t.k).total());
      if (t.kind == TargetKind::critical_mean) {
        e.name = "critical_mean[k=" + std::to_string(t.k) + "]";
        const auto m = mean_with_stderr(x);
        e.formula_value = mean;
        e.mc_estimate = m.mean;
        e.mc_stderr = m.se;
      } else if (t.kind == TargetKind::critical_variance) {
        e.name = "critical_variance[k=" + std::to_string(t.k) + "]";
        const auto v = variance_with_stderr(x);
        e.formula_value = var;
        e.mc_estimate = v.mean;
        e.mc_stderr = v.se;
      } else {
        e.name = "critical_ks[k=" + std::to_string(t.k) + "]";
        std::vector<double> z(reps);
        for (std::size_t r = 0; r < reps; ++r) z[r] = (x[r] - mean) / std::sqrt(var);
        const auto m = mean_with_stderr(z);
        e.formula_value = 0;
        e.mc_estimate = m.mean;
        e.mc_stderr = m.se;
        e.ks = ks_distance_normal(z);
      }
      break;
    }
    case TargetKind::critical_correlation: {
      e.name = "critical_correlation[" + std::to_string(t.k) + "," + std::to_string(t.j) + "]";
      const long long a = kp + t.k, b = kp + t.j;
      parallel_for(reps, threads, [&](std::size_t r) {
        const auto c = sample(r);
        const auto cc = critical_counts(c, static_cast<std::size_t>(std::max(a, b) + 1));
        x[r] = static_cast<double>(cc[static_cast<std::size_t>(a + 1)]);
        y[r] = static_cast<double>(cc[static_cast<std::size_t>(b + 1)]);
      });
      const double rho = pearson_correlation(x, y);
      e.formula_value = static_cast<double>(limiting_covariance(p, t.k, t.j));
      e.mc_estimate = rho;
      e.mc_stderr = (1 - rho * rho) / std::sqrt(static_cast<double>(reps) - 1);
      break;
    }
    case TargetKind::mle_mean:
    case TargetKind::mle_ks: {
      const int d = static_cast<int>(p.d());
      parallel_for(reps, threads, [&](std::size_t r) { x[r] = mle_fit(sample(r), d).p_hat[t.k - 1]; });
      const double pi = p.p(static_cast<std::size_t>(t.k));
      if (t.kind == TargetKind::mle_mean) {
        e.name = "mle_mean[i=" + std::to_string(t.k) + "]";
        const auto m = mean_with_stderr(x);
        e.formula_value = pi;
        e.mc_estimate = m.mean;
        e.mc_stderr = m.se;
      } else {
        e.name = "mle_ks[i=" + std::to_string(t.k) + "]";
        const MleScaling sc = mle_scaling(p, t.k);
        std::vector<double> z(reps);
        for (std::size_t r = 0; r < reps; ++r)
          z[r] = static_cast<double>(sc.scale) * (x[r] - pi) / std::sqrt(static_cast<double>(sc.limit_var));
        const auto m = mean_with_stderr(z);
        e.formula_value = 0;
        e.mc_estimate = m.mean;
        e.mc_stderr = m.se;
        e.ks = ks_distance_normal(z);
      }
      break;
    }
    case TargetKind::pattern_mean: {
      if (!t.pattern) throw std::invalid_argument("pattern_mean target needs a pattern");
      e.name = "pattern_mean";
      const PatternMembers members = iso_class(*t.pattern);
      parallel_for(reps, threads,
                   [&](std::size_t r) { x[r] = static_cast<double>(count_subcomplexes(sample(r), *t.pattern, members)); });
      const auto m = mean_with_stderr(x);
      e.formula_value = static_cast<double>(expected_count(*t.pattern, members, p));
      e.mc_estimate = m.mean;
      e.mc_stderr = m.se;
      break;
    }
  }
  e.z_score = detail::z_of(e.mc_estimate, e.formula_value, e.mc_stderr);
  return e;
}

inline VerificationReport run_verification(const std::vector<VerificationTarget>& targets, std::size_t reps,
                                           std::uint64_t seed, int threads = 0) {
  if (reps < 2) throw std::invalid_argument("verification needs at least two replicates");
  VerificationReport report;
  const unsigned workers = resolve_threads(threads);
  for (std::size_t i = 0; i < targets.size(); ++i) report.entries.push_back(verify_target(targets[i], i, reps, seed, workers));
  return report;
}

}  // namespace sgof
