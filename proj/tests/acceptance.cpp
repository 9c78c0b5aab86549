// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"

using namespace sgof;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Check&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %d %s (%.1fs)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

// 1 -------------------------------------------------------------------------
void fixture(Check& c) {
  const auto k = testing_helpers::small_fixture();
  Matching expect{{Simplex{2}, Simplex{1, 2}},
                  {Simplex{3}, Simplex{2, 3}},
                  {Simplex{4}, Simplex{1, 4}},
                  {Simplex{5}, Simplex{3, 5}},
                  {Simplex{4, 5}, Simplex{3, 4, 5}}};
  auto got = lexicographic_matching(k);
  auto by_face = [](const MatchedPair& a, const MatchedPair& b) { return a.face < b.face; };
  std::sort(got.begin(), got.end(), by_face);
  std::sort(expect.begin(), expect.end(), by_face);
  c.require(got == expect, "matching pairs");
  std::vector<Simplex> crit;
  for (std::size_t s = 1; s <= k.max_size(); ++s)
    for (const auto& t : k.simplices(s))
      if (classify_simplex(k, t) == Pairing::critical) crit.push_back(t);
  c.require(crit == std::vector<Simplex>{Simplex{1}, Simplex{3, 4}}, "critical cells {1}, {3,4}");
  const auto cc = critical_counts(k);
  c.require(cc.alternating_sum() == euler_characteristic(k) && euler_characteristic(k) == 0, "Euler identity");
  c.require(verify_acyclic(k, got), "acyclic");
}

// 2 -------------------------------------------------------------------------
void conservation(Check& c) {
  std::mt19937_64 g(2002);
  std::uniform_int_distribution<int> nn(2, 25), dd(1, 4);
  std::uniform_real_distribution<double> pp(0.1, 0.9);
  std::size_t cells = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = nn(g);
    std::vector<double> p(dd(g));
    for (auto& x : p) x = pp(g);
    if (t % 10 == 0) p[0] = 1.0;
    const auto k = sample_multiparameter(ModelParams(n, p), Seed{2002, static_cast<std::uint64_t>(t)});
    const auto cc = critical_counts(k);
    if (cc.alternating_sum() != euler_characteristic(k)) {
      c.require(false, "alternating sum at complex " + std::to_string(t));
      return;
    }
    std::map<Simplex, Pairing> want;
    for (const auto& [f, cf] : lexicographic_matching(k)) {
      want[f] = Pairing::matched_up;
      want[cf] = Pairing::matched_down;
    }
    for (std::size_t s = 1; s <= k.max_size(); ++s)
      for (const auto& x : k.simplices(s)) {
        const auto it = want.find(x);
        const Pairing w = it == want.end() ? Pairing::critical : it->second;
        ++cells;
        if (classify_simplex(k, x) != w) {
          c.require(false, "classification of " + x.to_string() + " in complex " + std::to_string(t));
          return;
        }
      }
  }
  c.note(std::to_string(cells) + " simplices classified");
}

// 3 -------------------------------------------------------------------------
void moment_formulas(Check& c) {
  const double frozen = 8.416465312243;  // finite sum, evaluated by the pairwise oracle
  const double oracle_mean = oracle::critical_mean(10, 2, {0.5, 0.5});
  const double mean = static_cast<double>(critical_mean_exact(ModelParams(10, {0.5, 0.5}), 1));
  c.require(std::abs(mean - frozen) <= 1e-9 && std::abs(mean - oracle_mean) <= 1e-9, "n=10 mean " + fmt("%.12f", mean));

  struct Cfg {
    std::size_t n;
    std::vector<double> p;
  };
  std::vector<Cfg> grid;
  for (std::size_t n : {8u, 10u, 12u})
    for (const auto& p : std::vector<std::vector<double>>{{0.5, 0.5}, {0.6, 0.3}, {1.0, 0.5, 0.5}}) grid.push_back({n, p});
  grid.push_back({10, {0.5, 0.5, 0.5}});
  const std::size_t reps = 100000;
  double worst = 0;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const ModelParams mp(grid[gi].n, grid[gi].p);
    const auto lo = static_cast<long long>(mp.k_prime()) + 1, hi = static_cast<long long>(mp.d());
    std::vector<std::vector<double>> x(hi + 1, std::vector<double>(reps));
    parallel_for(reps, resolve_threads(0), [&](std::size_t r) {
      const auto cc = critical_counts(sample_multiparameter(mp, derive_seed(3003, gi, r)), static_cast<std::size_t>(hi) + 1);
      for (long long k = lo; k <= hi; ++k) x[k][r] = static_cast<double>(cc[static_cast<std::size_t>(k + 1)]);
    });
    for (long long k = lo; k <= hi; ++k) {
      const auto m = mean_with_stderr(x[k]);
      const auto v = variance_with_stderr(x[k]);
      const double em = static_cast<double>(critical_mean_exact(mp, k));
      const double ev = static_cast<double>(critical_variance_exact(mp, k).total());
      const double zm = (m.mean - em) / m.se, zv = (v.mean - ev) / v.se;
      worst = std::max({worst, std::abs(zm), std::abs(zv)});
      std::ostringstream id;
      id << "n=" << grid[gi].n << " p=(";
      for (std::size_t i = 0; i < grid[gi].p.size(); ++i) id << (i ? "," : "") << grid[gi].p[i];
      id << ") k=" << k;
      c.require(std::abs(zm) <= 3, id.str() + fmt(" mean z=%.2f", zm));
      c.require(std::abs(zv) <= 3, id.str() + fmt(" variance z=%.2f", zv));
    }
  }
  c.note(fmt("largest |z| over the grid: %.2f", worst));
}

// 4 -------------------------------------------------------------------------
void limiting_covariance_check(Check& c) {
  const std::vector<double> p{0.5, 0.5, 0.5, 0.5};
  const ModelParams mp(100, p);
  const std::size_t reps = 2000;
  std::vector<double> t2(reps), t3(reps);
  parallel_for(reps, resolve_threads(0), [&](std::size_t r) {
    const auto cc = critical_counts(sample_multiparameter(mp, derive_seed(4004, 0, r)), 3);
    t2[r] = static_cast<double>(cc[2]);
    t3[r] = static_cast<double>(cc[3]);
  });
  const double emp = pearson_correlation(t2, t3);
  const double sigma = static_cast<double>(limiting_covariance(mp, 1, 2));
  c.require(std::abs(sigma - emp) <= 0.05, fmt("|sigma_inf(1,2) - corr| = |%.4f - %.4f| = %.4f > 0.05", sigma, emp, std::abs(sigma - emp)));
  const double exact = oracle::critical_covariance_words(100, 2, 3, p) /
                       std::sqrt(oracle::critical_covariance_words(100, 2, 2, p) * oracle::critical_covariance_words(100, 3, 3, p));
  c.note(fmt("exact finite-n correlation at n=100: %.4f (Monte Carlo %.4f, se %.4f)", exact, emp,
             (1 - emp * emp) / std::sqrt(reps - 1.0)));

  std::mt19937_64 g(4005);
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    auto q = testing_helpers::random_p(g, 2 + t % 4, 0.02);
    if (t % 4 == 0) q[0] = 1.0;
    const ModelParams m(60, q);
    const auto dim = static_cast<long long>(m.d() - m.k_prime());
    for (long long i = 1; i <= dim; ++i)
      for (long long j = i + 1; j <= dim; ++j) {
        ++checked;
        const auto v = limiting_covariance(m, i, j);
        c.require(v >= 0 && v <= limiting_covariance_bound(m, i, j), "upper bound at grid point " + std::to_string(t));
      }
  }
  c.note(std::to_string(checked) + " off-diagonal entries within the upper bound on 50 grid points");
}

// 5 -------------------------------------------------------------------------
void subcomplex_counts(Check& c) {
  const auto patterns = testing_helpers::small_patterns();
  std::mt19937_64 g(5005);
  int complexes = 0;
  // every complex on 4 vertices, then random ones up to 7
  oracle::enumerate_model(4, {0.5, 0.5, 0.5}, [&](const oracle::MaskComplex& mk, double) {
    const auto k = testing_helpers::from_masks(mk);
    ++complexes;
    for (const auto& l : patterns)
      if (count_subcomplexes(k, l) != testing_helpers::brute_count(k, l)) c.require(false, "count on 4 vertices");
  });
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 5 + t % 3;
    const auto k = sample_multiparameter(ModelParams(n, testing_helpers::random_p(g, 3, 0.3)), Seed{5005, static_cast<std::uint64_t>(t)});
    ++complexes;
    for (const auto& l : patterns)
      if (count_subcomplexes(k, l) != testing_helpers::brute_count(k, l)) c.require(false, "count at n=" + std::to_string(n));
  }
  c.note(std::to_string(complexes) + " complexes x " + std::to_string(patterns.size()) + " patterns");

  // the stated closed form 3 C(n,4) p1^5 p2^2 against Monte Carlo
  const auto dt = pattern_from_facets(4, {{1, 2, 3}, {2, 3, 4}});
  const ModelParams mp(10, {0.5, 0.5});
  const double stated = 3 * 210 * std::pow(0.5, 5) * std::pow(0.5, 2);
  const auto mem = iso_class(dt);
  std::vector<double> x(100000);
  parallel_for(x.size(), resolve_threads(0), [&](std::size_t r) {
    x[r] = static_cast<double>(count_subcomplexes(sample_multiparameter(mp, derive_seed(5006, 0, r)), dt, mem));
  });
  const auto m = mean_with_stderr(x);
  c.require(std::abs(m.mean - stated) <= 3 * m.se,
            fmt("double triangle: Monte Carlo mean %.4f (se %.4f) vs 3 C(n,4) p1^5 p2^2 = %.4f", m.mean, m.se, stated));
  const double ours = static_cast<double>(expected_count(dt, mem, mp));
  c.note(fmt("expected_count = %.4f with %g labelings; |z| against it = %.2f", ours, static_cast<double>(mem.size()),
             std::abs(m.mean - ours) / m.se));
}

// 6 -------------------------------------------------------------------------
void mle(Check& c) {
  const ModelParams mp(30, {0.6, 0.3});
  std::vector<double> a(10000), b(10000);
  parallel_for(a.size(), resolve_threads(0), [&](std::size_t r) {
    const auto f = mle_fit(sample_multiparameter(mp, derive_seed(6006, 0, r)), 2);
    a[r] = f.p_hat[0];
    b[r] = f.p_hat[1];
  });
  const auto ma = mean_with_stderr(a), mb = mean_with_stderr(b);
  c.require(std::abs(ma.mean - 0.6) <= 3 * ma.se, fmt("bias p1 %.5f (se %.5f)", ma.mean - 0.6, ma.se));
  c.require(std::abs(mb.mean - 0.3) <= 3 * mb.se, fmt("bias p2 %.5f (se %.5f)", mb.mean - 0.3, mb.se));
  const auto ks = verify_target({TargetKind::mle_ks, ModelParams(40, {0.5, 0.5}), 2, 2, {}}, 0, 10000, 6007, 0);
  c.require(ks.ks <= 0.05, fmt("KS %.4f", ks.ks));
  c.note(fmt("bias z = %.2f, %.2f; KS at n=40: %.4f", (ma.mean - 0.6) / ma.se, (mb.mean - 0.3) / mb.se, ks.ks));
}

// 7 -------------------------------------------------------------------------
void size_and_power(Check& c) {
  SweepSpec edge;
  edge.model = GeometricModel::edge;
  edge.grid = {{0.0, 1.732050808, std::nullopt}, {0.4924, 0.4924, std::nullopt}};
  edge.reps = 50;
  edge.seed = 7007;
  edge.statistics = {GofStatistic::critical};
  const auto e = run_sweep(edge, 0);
  SweepSpec tetra = edge;
  tetra.model = GeometricModel::tetra;
  tetra.grid = {{0.09, 0.09, std::nullopt}};
  tetra.statistics = {GofStatistic::critical, GofStatistic::triangle};
  const auto t = run_sweep(tetra, 0);
  const auto pe0 = e.rows[0].passes, pe1 = e.rows[1].passes, ptc = t.rows[0].passes, ptt = t.rows[1].passes;
  c.require(pe0 >= 45, "edge (0, sqrt 3) critical passes " + std::to_string(pe0));
  c.require(pe1 <= 4, "edge (0.4924, 0.4924) critical passes " + std::to_string(pe1));
  c.require(ptt >= 45, "tetra (0.09, 0.09) triangle passes " + std::to_string(ptt));
  c.require(ptc <= 8, "tetra (0.09, 0.09) critical passes " + std::to_string(ptc));
  c.note("passes/50: edge null " + std::to_string(pe0) + ", edge geometric " + std::to_string(pe1) +
         ", tetra triangle " + std::to_string(ptt) + ", tetra critical " + std::to_string(ptc));
}

// 8 -------------------------------------------------------------------------
void determinism(Check& c) {
  SweepSpec s;
  s.model = GeometricModel::tri;
  s.grid = {{0.0, 0.5, std::nullopt}, {0.1, 0.3, std::nullopt}, {0.2, 0.2, std::nullopt}};
  s.reps = 8;
  s.seed = 8008;
  auto csv = [&](int threads) {
    std::ostringstream out;
    write_sweep_csv(out, s, run_sweep(s, threads));
    return out.str();
  };
  const auto one = csv(1);
  c.require(one == csv(4), "tri sweep threads 1 vs 4");
  s.model = GeometricModel::edge;
  c.require(csv(1) == csv(4), "edge sweep threads 1 vs 4");
}

}  // namespace

int main() {
  report(1, "small fixture matching and Euler identity", fixture);
  report(2, "Morse conservation on 500 random complexes", conservation);
  report(3, "moment formulas against Monte Carlo", moment_formulas);
  report(4, "limiting covariance", limiting_covariance_check);
  report(5, "subcomplex counts", subcomplex_counts);
  report(6, "MLE bias and normality", mle);
  report(7, "goodness-of-fit size and power", size_and_power);
  report(8, "sweep determinism across thread counts", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}
