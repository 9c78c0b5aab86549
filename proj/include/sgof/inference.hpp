#pragma once

// Maximum-likelihood fit of X(n, p) and chi-square goodness-of-fit tests
// built on critical-simplex counts (or, as a baseline, triangle counts).

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgof/complex.hpp"
#include "sgof/models.hpp"
#include "sgof/moments.hpp"
#include "sgof/morse.hpp"
#include "sgof/subcomplex.hpp"

namespace sgof {

struct MleResult {
  std::vector<double> p_hat;  // p_hat[i-1] estimates p_i, i = 1..d
  int i_observed = 0;
  SkeletonCounts counts;
};

inline MleResult mle_fit(const SimplicialComplex& k, int d) {
  MleResult r;
  r.counts = skeleton_counts(k, d);
  r.i_observed = r.counts.i_max;
  r.p_hat.assign(static_cast<std::size_t>(d), 0.0);
  for (int i = 1; i <= d; ++i)
    if (r.counts.h[i] != 0)
      r.p_hat[i - 1] = static_cast<double>(r.counts.s[i]) / static_cast<double>(r.counts.h[i]);
  return r;
}

inline double chi_square_quantile(int df, double prob) {
  if (df < 1) throw std::invalid_argument("chi-square needs df >= 1");
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), prob);
}

enum class GofStatistic { critical, triangle };

struct GofOptions {
  double alpha = 0.05;
  std::optional<std::size_t> k_prime;  // leading p entries known to equal 1
  bool diagonal_sigma = false;
};

struct GofResult {
  std::vector<double> p_hat;
  std::size_t k_prime = 0;
  std::vector<std::size_t> sizes;  // simplex size of each retained component
  std::vector<double> t;           // observed counts
  std::vector<double> expected;
  std::vector<double> variance;
  std::vector<double> w;
  std::vector<std::vector<double>> sigma;
  double statistic = 0;
  int df = 0;
  double threshold = 0;
  bool reject = false;
  bool inconclusive = false;
  std::vector<std::string> warnings;

  bool passed() const { return !reject && !inconclusive; }
};

namespace detail {

// Fitted null model: p_hat with the first k' entries set to one.
inline ModelParams fitted_model(std::size_t n, std::vector<double> p_hat, const GofOptions& opt, std::size_t& k_prime,
                                std::vector<std::string>& warnings) {
  std::size_t kp = 0;
  if (opt.k_prime) {
    kp = std::min(*opt.k_prime, p_hat.size());
    if (*opt.k_prime > p_hat.size()) warnings.push_back("k' exceeds d; clamped to " + std::to_string(kp));
  } else {
    while (kp < p_hat.size() && p_hat[kp] >= 1.0 - 1e-12) ++kp;
  }
  for (std::size_t i = 0; i < kp; ++i) p_hat[i] = 1.0;
  const std::size_t d = p_hat.size();
  while (!p_hat.empty() && p_hat.back() == 0.0) p_hat.pop_back();
  if (p_hat.size() < d) warnings.push_back("fitted dimension truncated to " + std::to_string(p_hat.size()));
  for (std::size_t i = 0; i < p_hat.size(); ++i)
    if (p_hat[i] == 0.0) throw std::logic_error("interior zero in fitted probabilities");
  k_prime = kp;
  return ModelParams(n, std::move(p_hat));
}

// Fill w, sigma, statistic, df, threshold and reject from expected/variance,
// dropping components whose variance is not positive or that make sigma
// singular.
inline void finish_test(GofResult& r, std::vector<std::vector<double>> sigma_full, double alpha) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < r.t.size(); ++c) {
    if (!(r.variance[c] > 0.0) || !std::isfinite(r.variance[c])) {
      r.warnings.push_back("component of size " + std::to_string(r.sizes[c]) + " dropped: variance " +
                           std::to_string(r.variance[c]));
      continue;
    }
    keep.push_back(c);
  }
  while (!keep.empty()) {
    Eigen::MatrixXd s(keep.size(), keep.size());
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b) s(a, b) = sigma_full[keep[a]][keep[b]];
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() == Eigen::Success) break;
    r.warnings.push_back("sigma not positive definite; component of size " + std::to_string(r.sizes[keep.back()]) +
                         " dropped");
    keep.pop_back();
  }

  auto select = [&](const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t c : keep) out.push_back(v[c]);
    return out;
  };
  std::vector<std::size_t> sizes;
  for (std::size_t c : keep) sizes.push_back(r.sizes[c]);
  r.sizes = sizes;
  r.t = select(r.t);
  r.expected = select(r.expected);
  r.variance = select(r.variance);

  r.sigma.assign(keep.size(), std::vector<double>(keep.size(), 0.0));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) r.sigma[a][b] = sigma_full[keep[a]][keep[b]];

  r.df = static_cast<int>(keep.size());
  if (keep.empty()) {
    r.inconclusive = true;
    r.warnings.push_back("no usable component; result inconclusive");
    return;
  }
  Eigen::VectorXd w(keep.size());
  Eigen::MatrixXd s(keep.size(), keep.size());
  r.w.clear();
  for (std::size_t a = 0; a < keep.size(); ++a) {
    w(a) = (r.t[a] - r.expected[a]) / std::sqrt(r.variance[a]);
    r.w.push_back(w(a));
    for (std::size_t b = 0; b < keep.size(); ++b) s(a, b) = r.sigma[a][b];
  }
  r.statistic = w.dot(s.llt().solve(w));
  r.threshold = chi_square_quantile(r.df, 1.0 - alpha);
  r.reject = r.statistic > r.threshold;
}

}  // namespace detail

// Components are the critical counts of sizes k'+2 .. d+1 of the fitted model.
inline GofResult gof_critical(const SimplicialComplex& k, int d, const GofOptions& opt = {}) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  GofResult r;
  const MleResult fit = mle_fit(k, d);
  r.p_hat = fit.p_hat;
  const ModelParams model = detail::fitted_model(k.vertex_count(), fit.p_hat, opt, r.k_prime, r.warnings);
  const auto kp = static_cast<long long>(model.k_prime());
  const auto top = static_cast<long long>(model.d());
  const CriticalCounts crit = critical_counts(k, static_cast<std::size_t>(top) + 1);
  for (long long kk = kp + 1; kk <= top && kk <= static_cast<long long>(k.vertex_count()) - 1; ++kk) {
    r.sizes.push_back(static_cast<std::size_t>(kk + 1));
    r.t.push_back(static_cast<double>(crit[static_cast<std::size_t>(kk + 1)]));
    r.expected.push_back(static_cast<double>(critical_mean_exact(model, kk)));
    r.variance.push_back(static_cast<double>(critical_variance_exact(model, kk).total()));
  }
  std::vector<std::vector<double>> sigma(r.sizes.size(), std::vector<double>(r.sizes.size(), 0.0));
  for (std::size_t a = 0; a < r.sizes.size(); ++a)
    for (std::size_t b = 0; b < r.sizes.size(); ++b)
      sigma[a][b] = a == b ? 1.0
                    : opt.diagonal_sigma
                        ? 0.0
                        : static_cast<double>(limiting_covariance(model, static_cast<long long>(a + 1),
                                                                  static_cast<long long>(b + 1)));
  detail::finish_test(r, std::move(sigma), opt.alpha);
  return r;
}

// Two-sided z-test of the number of 2-simplices against its exact mean and
// variance at the fitted parameters.
inline GofResult gof_triangle(const SimplicialComplex& k, int d, const GofOptions& opt = {}) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (d < 2) throw std::invalid_argument("triangle statistic needs d >= 2");
  GofResult r;
  const MleResult fit = mle_fit(k, d);
  r.p_hat = fit.p_hat;
  const ModelParams model = detail::fitted_model(k.vertex_count(), fit.p_hat, opt, r.k_prime, r.warnings);
  r.sizes = {3};
  r.t = {static_cast<double>(k.count(3))};
  if (k.vertex_count() >= 3) {
    const PatternComplex tri = simplex_pattern(3);
    r.expected = {static_cast<double>(expected_count(tri, model))};
    r.variance = {static_cast<double>(exact_covariance(tri, tri, model))};
  } else {
    r.expected = {0.0};
    r.variance = {0.0};
  }
  detail::finish_test(r, {{1.0}}, opt.alpha);
  return r;
}

inline GofResult run_gof(GofStatistic stat, const SimplicialComplex& k, int d, const GofOptions& opt = {}) {
  return stat == GofStatistic::critical ? gof_critical(k, d, opt) : gof_triangle(k, d, opt);
}

inline GofStatistic parse_statistic(const std::string& s) {
  if (s == "critical") return GofStatistic::critical;
  if (s == "triangle") return GofStatistic::triangle;
  throw std::invalid_argument("unknown statistic '" + s + "'");
}

inline std::string to_string(GofStatistic s) { return s == GofStatistic::critical ? "critical" : "triangle"; }

}  // namespace sgof
