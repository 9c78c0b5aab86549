#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgof/sgof.hpp"

using json = nlohmann::json;
using namespace sgof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format;  // empty: command default
  std::string out;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ConfigError("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> to_double(const std::vector<real>& v) { return {v.begin(), v.end()}; }

json matrix_json(const std::vector<std::vector<real>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(to_double(row));
  return a;
}

// Writes to --out or stdout.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw std::runtime_error("cannot write " + g.out);
  f << text;
}

std::string format_of(const Globals& g, const std::string& fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "json" && f != "csv") throw ConfigError("format must be json or csv");
  return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string model = "xnp";
  std::size_t n = 0;
  std::string p;
  std::size_t ambient_dim = 0;
  double eps1 = 0, eps2 = 0;
  std::size_t reps = 1;
  std::size_t grid_index = 0;
  double calibrate_density = -1;
  bool periodic = false;
};

int cmd_sample(const Globals& g, const SampleArgs& a) {
  if (a.calibrate_density >= 0) {
    if (a.calibrate_density > 1) throw ConfigError("density must lie in [0,1]");
    const std::size_t dim = a.ambient_dim ? a.ambient_dim : 3;
    const double r = calibrate_distance_threshold(dim, a.calibrate_density, 1'000'000, Seed{g.seed, 0}, a.periodic);
    emit(g, dump({{"ambient_dim", dim}, {"density", a.calibrate_density}, {"periodic", a.periodic}, {"threshold", r}}));
    return kExitOk;
  }
  if (a.reps < 1) throw ConfigError("reps must be at least 1");
  std::ostringstream text;
  for (std::size_t r = 0; r < a.reps; ++r) {
    const Seed seed = derive_seed(g.seed, a.grid_index, r);
    SimplicialComplex c;
    if (a.model == "xnp") {
      if (!a.n) throw ConfigError("--n is required for xnp");
      c = sample_multiparameter(ModelParams(a.n, parse_list(a.p)), seed);
    } else {
      ModelSetup setup = geometric_model(parse_model(a.model), a.eps1, a.eps2);
      if (a.n) setup.n = a.n;
      if (a.ambient_dim) setup.ambient_dim = a.ambient_dim;
      c = sample_soft_geometric(setup.n, setup.ambient_dim, setup.kernel, seed).second;
    }
    if (a.reps > 1 && !g.out.empty()) {
      write_complex_file(g.out + "." + std::to_string(r) + ".txt", c);
      continue;
    }
    if (a.reps > 1) text << "# replicate " << r << "\n";
    write_complex(text, c);
  }
  if (a.reps == 1 || g.out.empty()) emit(g, text.str());
  return kExitOk;
}

int cmd_fit(const Globals& g, const std::string& in, int d) {
  const MleResult r = mle_fit(read_complex_file(in), d);
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"i", "p_hat", "s", "h"});
    for (int i = 1; i <= d; ++i)
      s += csv_row({std::to_string(i), format_real(r.p_hat[i - 1]), std::to_string(r.counts.s[i]),
                    std::to_string(r.counts.h[i])});
    emit(g, s);
  } else {
    std::vector<std::uint64_t> s(r.counts.s.begin() + 1, r.counts.s.end());
    std::vector<std::uint64_t> h(r.counts.h.begin() + 1, r.counts.h.end());
    emit(g, dump({{"p_hat", r.p_hat}, {"i_observed", r.i_observed}, {"s", s}, {"h", h}}));
  }
  return kExitOk;
}

struct GofArgs {
  std::string in;
  int d = 0;
  int k_prime = -1;
  double alpha = 0.05;
  std::string statistic = "critical";
  bool diagonal_sigma = false;
};

json gof_json(const GofResult& r) {
  return {{"p_hat", r.p_hat},         {"k_prime", r.k_prime},     {"sizes", r.sizes},
          {"t", r.t},                 {"expected", r.expected},   {"variance", r.variance},
          {"w", r.w},                 {"sigma", r.sigma},         {"statistic", r.statistic},
          {"df", r.df},               {"threshold", r.threshold}, {"reject", r.reject},
          {"inconclusive", r.inconclusive}, {"warnings", r.warnings}};
}

int cmd_gof(const Globals& g, const GofArgs& a) {
  GofOptions opt;
  opt.alpha = a.alpha;
  opt.diagonal_sigma = a.diagonal_sigma;
  if (a.k_prime >= 0) opt.k_prime = static_cast<std::size_t>(a.k_prime);
  const GofResult r = run_gof(parse_statistic(a.statistic), read_complex_file(a.in), a.d, opt);
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"size", "t", "expected", "variance", "w"});
    for (std::size_t c = 0; c < r.w.size(); ++c)
      s += csv_row({std::to_string(r.sizes[c]), format_real(r.t[c]), format_real(r.expected[c]),
                    format_real(r.variance[c]), format_real(r.w[c])});
    s += "# statistic=" + format_real(r.statistic) + " df=" + std::to_string(r.df) +
         " threshold=" + format_real(r.threshold) + " reject=" + (r.reject ? "true" : "false") + "\n";
    emit(g, s);
  } else {
    emit(g, dump(gof_json(r)));
  }
  return kExitOk;
}

int cmd_critical(const Globals& g, const std::string& in, std::size_t max_size) {
  const SimplicialComplex c = read_complex_file(in);
  const std::size_t top = max_size ? max_size : c.max_size();
  const CriticalCounts cc = critical_counts(c, top);
  std::vector<std::uint64_t> crit, total;
  for (std::size_t k = 1; k <= top; ++k) {
    crit.push_back(cc[k]);
    total.push_back(k <= c.max_size() ? c.count(k) : 0);
  }
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"size", "critical", "total"});
    for (std::size_t k = 1; k <= top; ++k)
      s += csv_row({std::to_string(k), std::to_string(crit[k - 1]), std::to_string(total[k - 1])});
    emit(g, s);
  } else {
    emit(g, dump({{"c", crit}, {"euler", euler_characteristic(c)}, {"total_simplices", total}}));
  }
  return kExitOk;
}

int cmd_count(const Globals& g, const std::string& in, const std::string& pattern_path, const std::string& params) {
  const SimplicialComplex c = read_complex_file(in);
  const PatternComplex pattern(read_complex_file(pattern_path));
  const PatternMembers members = iso_class(pattern);
  json j = {{"count", count_subcomplexes(c, pattern, members)}, {"iso_class_size", members.size()}};
  if (!params.empty()) {
    const ModelParams p(c.vertex_count(), parse_list(params));
    j["expected"] = static_cast<double>(expected_count(pattern, members, p));
    j["variance"] = static_cast<double>(exact_covariance(pattern, pattern, p));
  }
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"count", "expected", "variance"});
    s += csv_row({j["count"].dump(), j.contains("expected") ? j["expected"].dump() : "",
                  j.contains("variance") ? j["variance"].dump() : ""});
    emit(g, s);
  } else {
    emit(g, dump(j));
  }
  return kExitOk;
}

int cmd_moments(const Globals& g, std::size_t n, const std::string& p, long long k) {
  const ModelParams params(n, parse_list(p));
  const MomentReport r = moment_report(params, k);
  const VarianceParts& v = r.variance;
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"mean", "mean_lower", "mean_upper", "variance", "v1", "v2", "v3", "v4"});
    s += csv_row({format_real(static_cast<double>(r.mean)), format_real(static_cast<double>(r.mean_bounds.lower)),
                  format_real(static_cast<double>(r.mean_bounds.upper)), format_real(static_cast<double>(v.total())),
                  format_real(static_cast<double>(v.v1)), format_real(static_cast<double>(v.v2)),
                  format_real(static_cast<double>(v.v3)), format_real(static_cast<double>(v.v4))});
    emit(g, s);
  } else {
    json j = {{"mean", static_cast<double>(r.mean)},
              {"mean_lower", static_cast<double>(r.mean_bounds.lower)},
              {"mean_upper", static_cast<double>(r.mean_bounds.upper)},
              {"variance", static_cast<double>(v.total())},
              {"V", to_double({v.v1, v.v2, v.v3, v.v4})},
              {"sigma_inf", matrix_json(r.sigma_inf)}};
    emit(g, dump(j));
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config;
  std::string model;
  int reps = -1;
  double alpha = -1;
  std::string statistics;
  std::string rows;
  bool diagonal_sigma = false;
  int k_prime = -1;
  bool progress = false;
};

SweepSpec load_sweep(const SweepArgs& a) {
  json cfg;
  {
    std::ifstream f(a.config);
    if (!f) throw ConfigError("cannot open config " + a.config);
    try {
      cfg = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError(a.config + ": " + e.what());
    }
  }
  SweepSpec spec;
  try {
    spec.model = parse_model(a.model.empty() ? cfg.at("model").get<std::string>() : a.model);
    spec.reps = cfg.value("reps", std::size_t{50});
    spec.alpha = cfg.value("alpha", 0.05);
    const auto& grid = cfg.at("grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
      spec.grid.push_back({grid[i].at("eps1").get<double>(), grid[i].at("eps2").get<double>(), i});
  } catch (const json::exception& e) {
    throw ConfigError(a.config + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(a.config + ": " + e.what());
  }
  if (!a.rows.empty()) {
    std::vector<SweepPoint> picked;
    for (double r : parse_list(a.rows)) {
      const auto idx = static_cast<std::size_t>(r);
      if (r < 0 || idx >= spec.grid.size() || static_cast<double>(idx) != r)
        throw ConfigError("row " + format_real(r) + " outside the grid");
      picked.push_back(spec.grid[idx]);
    }
    spec.grid = picked;
  }
  if (a.reps >= 0) spec.reps = static_cast<std::size_t>(a.reps);
  if (a.alpha >= 0) spec.alpha = a.alpha;
  if (!a.statistics.empty()) {
    spec.statistics.clear();
    std::stringstream ss(a.statistics);
    for (std::string tok; std::getline(ss, tok, ',');) spec.statistics.push_back(parse_statistic(tok));
  }
  spec.diagonal_sigma = a.diagonal_sigma;
  if (a.k_prime >= 0) spec.k_prime = static_cast<std::size_t>(a.k_prime);
  return spec;
}

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  SweepSpec spec = load_sweep(a);
  spec.seed = g.seed;
  spec.validate();
  std::function<void(std::size_t, std::size_t)> progress;
  if (a.progress)
    progress = [](std::size_t done, std::size_t total) { std::fprintf(stderr, "\r%zu/%zu", done, total); };
  const SweepResult result = run_sweep(spec, g.threads, progress);
  if (a.progress) std::fprintf(stderr, "\n");
  if (format_of(g, "csv") == "csv") {
    std::ostringstream s;
    write_sweep_csv(s, spec, result);
    emit(g, s.str());
  } else {
    json rows = json::array();
    for (const auto& r : result.rows)
      rows.push_back({{"eps1", r.point.eps1},
                      {"eps2", r.point.eps2},
                      {"statistic", to_string(r.statistic)},
                      {"passes", r.passes},
                      {"rejects", r.rejects},
                      {"inconclusive", r.inconclusive},
                      {"reps", r.reps},
                      {"grid_index", r.grid_index}});
    emit(g, dump({{"model", to_string(spec.model)}, {"alpha", spec.alpha}, {"seed", spec.seed}, {"rows", rows}}));
  }
  if (result.inconclusive_fraction() > 0.10) {
    std::fprintf(stderr, "sgof: %.1f%% of replicates inconclusive\n", 100 * result.inconclusive_fraction());
    return kExitInconclusive;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::size_t n = 0;
  std::string p;
  std::string targets = "critical_mean,critical_variance";
  long long k = 1;
  long long j = 2;
  std::size_t reps = 1000;
  std::string pattern;
};

int cmd_verify(const Globals& g, const VerifyArgs& a) {
  const ModelParams params(a.n, parse_list(a.p));
  std::vector<VerificationTarget> targets;
  std::stringstream ss(a.targets);
  for (std::string tok; std::getline(ss, tok, ',');) {
    VerificationTarget t{parse_target(tok), params, a.k, a.j, std::nullopt};
    if (t.kind == TargetKind::pattern_mean) {
      if (a.pattern.empty()) throw ConfigError("pattern_mean needs --pattern");
      t.pattern = PatternComplex(read_complex_file(a.pattern));
    }
    targets.push_back(std::move(t));
  }
  const VerificationReport rep = run_verification(targets, a.reps, g.seed, g.threads);
  if (format_of(g, "json") == "csv") {
    std::string s = csv_row({"target", "formula", "estimate", "stderr", "z", "ks", "reps"});
    for (const auto& e : rep.entries)
      s += csv_row({e.name, format_real(e.formula_value), format_real(e.mc_estimate), format_real(e.mc_stderr),
                    format_real(e.z_score), std::isnan(e.ks) ? "" : format_real(e.ks), std::to_string(e.reps)});
    emit(g, s);
  } else {
    json entries = json::array();
    for (const auto& e : rep.entries) {
      json je = {{"target", e.name},         {"formula_value", e.formula_value}, {"mc_estimate", e.mc_estimate},
                 {"mc_stderr", e.mc_stderr}, {"z_score", e.z_score},             {"reps", e.reps}};
      if (!std::isnan(e.ks)) je["ks"] = e.ks;
      entries.push_back(je);
    }
    emit(g, dump({{"seed", g.seed}, {"entries", entries}}));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random simplicial complexes: sampling, critical simplices, moments and goodness of fit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (default: SGOF_THREADS or all cores)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "output path (default: stdout)");
  app.fallthrough();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "sample complexes from a model");
  sample->add_option("--model", sa.model)->check(CLI::IsMember({"xnp", "tetra", "tri", "edge"}))->capture_default_str();
  sample->add_option("--n", sa.n, "vertices (xnp; overrides the geometric default)");
  sample->add_option("--p", sa.p, "comma-separated p_1,p_2,... (xnp)");
  sample->add_option("--ambient-dim", sa.ambient_dim, "point-cloud dimension (geometric)");
  sample->add_option("--eps1", sa.eps1, "lower threshold (geometric)");
  sample->add_option("--eps2", sa.eps2, "upper threshold (geometric)");
  sample->add_option("--reps", sa.reps, "number of replicates")->capture_default_str();
  sample->add_option("--grid-index", sa.grid_index, "grid row used in seed derivation")->capture_default_str();
  sample->add_option("--calibrate-density", sa.calibrate_density,
                     "print the distance threshold with this edge density and exit");
  sample->add_flag("--periodic", sa.periodic, "calibrate on the torus (no boundary effect)");

  std::string fit_in;
  int fit_d = 0;
  auto* fit = app.add_subcommand("fit", "maximum-likelihood estimate of p");
  fit->add_option("--in", fit_in)->required();
  fit->add_option("--d", fit_d)->required()->check(CLI::PositiveNumber);

  GofArgs ga;
  auto* gof = app.add_subcommand("gof", "goodness-of-fit test");
  gof->add_option("--in", ga.in)->required();
  gof->add_option("--d", ga.d)->required()->check(CLI::PositiveNumber);
  gof->add_option("--k-prime", ga.k_prime, "leading probabilities equal to one");
  gof->add_option("--alpha", ga.alpha)->capture_default_str();
  gof->add_option("--statistic", ga.statistic)->check(CLI::IsMember({"critical", "triangle"}))->capture_default_str();
  gof->add_flag("--diagonal-sigma", ga.diagonal_sigma, "ignore limiting off-diagonal correlations");

  std::string crit_in;
  std::size_t crit_max = 0;
  auto* critical = app.add_subcommand("critical", "critical simplex counts");
  critical->add_option("--in", crit_in)->required();
  critical->add_option("--max-size", crit_max, "largest simplex size (default: complex dimension + 1)");

  std::string count_in, count_pattern, count_params;
  auto* count = app.add_subcommand("count", "count copies of a pattern complex");
  count->add_option("--in", count_in)->required();
  count->add_option("--pattern", count_pattern)->required();
  count->add_option("--params", count_params, "p list for expectation and variance");

  std::size_t mom_n = 0;
  std::string mom_p;
  long long mom_k = 1;
  auto* moments = app.add_subcommand("moments", "exact moments of critical counts");
  moments->add_option("--n", mom_n)->required();
  moments->add_option("--p", mom_p)->required();
  moments->add_option("--k", mom_k, "counts simplices on k+1 vertices")->required();

  SweepArgs swa;
  auto* sweep = app.add_subcommand("sweep", "interpolation sweep over a geometric model");
  sweep->add_option("--config", swa.config, "grid JSON")->required();
  sweep->add_option("--model", swa.model, "override the config model");
  sweep->add_option("--reps", swa.reps, "replicates per grid point");
  sweep->add_option("--alpha", swa.alpha);
  sweep->add_option("--statistics", swa.statistics, "comma-separated critical,triangle");
  sweep->add_option("--rows", swa.rows, "comma-separated grid rows (0-based)");
  sweep->add_flag("--diagonal-sigma", swa.diagonal_sigma);
  sweep->add_option("--k-prime", swa.k_prime);
  sweep->add_flag("--progress", swa.progress);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Monte-Carlo check of formulas");
  verify->add_option("--n", va.n)->required();
  verify->add_option("--p", va.p)->required();
  verify->add_option("--targets", va.targets)->capture_default_str();
  verify->add_option("--k", va.k)->capture_default_str();
  verify->add_option("--j", va.j)->capture_default_str();
  verify->add_option("--reps", va.reps)->capture_default_str();
  verify->add_option("--pattern", va.pattern);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(g, sa);
    if (*fit) return cmd_fit(g, fit_in, fit_d);
    if (*gof) return cmd_gof(g, ga);
    if (*critical) return cmd_critical(g, crit_in, crit_max);
    if (*count) return cmd_count(g, count_in, count_pattern, count_params);
    if (*moments) return cmd_moments(g, mom_n, mom_p, mom_k);
    if (*sweep) return cmd_sweep(g, swa);
    if (*verify) return cmd_verify(g, va);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "sgof: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "sgof: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "sgof: %s\n", e.what());
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "sgof: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sgof: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
