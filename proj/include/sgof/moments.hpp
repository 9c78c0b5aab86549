#pragma once

// Closed-form moments of critical-simplex counts under the lexicographical
// matching in X(n, p), and the standardisation constants of the MLE.
//
// Throughout, k is the size parameter: T_{k+1} counts critical simplices on
// k+1 vertices (dimension k), for k' + 1 <= k <= n - 1.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgof/models.hpp"
#include "sgof/numeric.hpp"

namespace sgof {

namespace detail {

// Neumaier-compensated running sum.
class Accumulator {
 public:
  void add(real x) {
    const real t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  real value() const { return sum_ + comp_; }

 private:
  real sum_ = 0.0L;
  real comp_ = 0.0L;
};

inline real powr(real base, long long e) {
  if (e <= 0) return 1.0L;
  return std::pow(base, static_cast<real>(e));
}

}  // namespace detail

// rho(a)  = prod_{i=k'+1}^{a} p_i^{C(a,i)}    probability that a cone over an
//           a-set is complete, given the a-set itself
// rho+(a) = prod_{i=k'+1}^{a} p_i^{C(a,i+1)}  probability that an a-set is a simplex
// P(i)    = prod_{j=1}^{i-1} p_j^{C(i+1,j+1)} probability that an (i+1)-set is hollow
class RhoTable {
 public:
  explicit RhoTable(const ModelParams& params) : params_(params), kp_(static_cast<long long>(params.k_prime())) {}

  long long k_prime() const { return kp_; }

  real rho(long long a) const {
    real r = 1.0L;
    for (long long i = kp_ + 1; i <= a; ++i) r *= detail::powr(p(i), static_cast<long long>(binom(a, i)));
    return r;
  }

  real rho_plus(long long a) const {
    real r = 1.0L;
    for (long long i = kp_ + 1; i <= a; ++i) r *= detail::powr(p(i), static_cast<long long>(binom(a, i + 1)));
    return r;
  }

  real hollow_probability(long long i) const {
    real r = 1.0L;
    for (long long j = 1; j <= i - 1; ++j) r *= detail::powr(p(j), static_cast<long long>(binom(i + 1, j + 1)));
    return r;
  }

  real p(long long i) const { return static_cast<real>(params_.p(static_cast<std::size_t>(i))); }

 private:
  ModelParams params_;
  long long kp_;
};

namespace detail {

inline void check_size_parameter(const ModelParams& params, long long k) {
  const auto kp = static_cast<long long>(params.k_prime());
  const auto n = static_cast<long long>(params.n());
  if (k < kp + 1 || k > n - 1)
    throw std::out_of_range("size parameter k=" + std::to_string(k) + " outside [k'+1, n-1] = [" +
                            std::to_string(kp + 1) + ", " + std::to_string(n - 1) + "]");
}

// The mean series and its bounds stay valid below k'+1 (they are zero there).
inline void check_mean_parameter(const ModelParams& params, long long k) {
  const auto n = static_cast<long long>(params.n());
  if (k < 1 || k > n - 1)
    throw std::out_of_range("size parameter k=" + std::to_string(k) + " outside [1, n-1] = [1, " +
                            std::to_string(n - 1) + "]");
}

}  // namespace detail

// mu(a): probability that a fixed (k+1)-set with minimum vertex a is a
// critical simplex.
inline real mu_of(long long a, const ModelParams& params, long long k) {
  const RhoTable t(params);
  const real up = t.rho(k + 1);
  const real down = t.rho(k);
  return t.rho_plus(k + 1) * (detail::powr(1.0L - up, a - 1) - detail::powr(1.0L - down, a - 1));
}

// E[T_{k+1}] = sum_{l=1}^{n-k} C(n-l, k) mu(l)
inline real critical_mean_exact(const ModelParams& params, long long k) {
  detail::check_mean_parameter(params, k);
  const RhoTable t(params);
  const auto n = static_cast<long long>(params.n());
  const real rp = t.rho_plus(k + 1);
  const real up = 1.0L - t.rho(k + 1);
  const real down = 1.0L - t.rho(k);
  detail::Accumulator acc;
  real up_pow = 1.0L, down_pow = 1.0L;
  for (long long l = 1; l <= n - k; ++l) {
    acc.add(binom(n - l, k) * rp * (up_pow - down_pow));
    up_pow *= up;
    down_pow *= down;
  }
  return acc.value();
}

struct MeanBounds {
  real lower;
  real upper;  // +inf when rho(k+1) = 0
};

// Lower bound: the l = 2 summand. Upper bound: C(n-1, k) times the infinite
// series, rho+(k+1) (1/rho(k+1) - 1/rho(k)).
inline MeanBounds critical_mean_bounds(const ModelParams& params, long long k) {
  detail::check_mean_parameter(params, k);
  const RhoTable t(params);
  const auto n = static_cast<long long>(params.n());
  const real rp = t.rho_plus(k + 1);
  const real up = t.rho(k + 1);
  const real down = t.rho(k);
  MeanBounds b{};
  b.lower = binom(n - 2, k) * rp * (down - up);
  b.upper = up > 0.0L ? binom(n - 1, k) * rp * (1.0L / up - 1.0L / down) : std::numeric_limits<real>::infinity();
  return b;
}

struct VarianceParts {
  real v1 = 0, v2 = 0, v3 = 0, v4 = 0;
  real total() const { return v1 + v2 + v3 + v4; }
};

// Var(T_{k+1}) = V1 + V2 + V3 + V4: V4 collects the diagonal s = t, V3 the
// pairs with equal minima, V1 (min t in s) and V2 (min t not in s) the pairs
// with min s < min t, each counted for both orders.
inline VarianceParts critical_variance_exact(const ModelParams& params, long long k) {
  detail::check_size_parameter(params, k);
  const RhoTable t(params);
  const auto n = static_cast<long long>(params.n());
  const long long kp = t.k_prime();

  const long long top = k + 1;
  std::vector<real> rho(top + 1), rho_plus(top + 1);
  for (long long a = 0; a <= top; ++a) {
    rho[a] = a <= kp ? 1.0L : t.rho(a);
    rho_plus[a] = a <= kp ? 1.0L : t.rho_plus(a);
  }
  // a zero p_i with i <= k kills every (k+1)-simplex, so T_{k+1} = 0 a.s.;
  // otherwise every inverted rho below is positive
  if (rho_plus[k + 1] <= 0.0L) return {};

  const real rk1 = rho[k + 1], rk = rho[k];
  const real rp2 = rho_plus[k + 1] * rho_plus[k + 1];

  std::vector<real> mu(n - k + 1, 0.0L);
  for (long long l = 1; l <= n - k; ++l)
    mu[l] = rho_plus[k + 1] * (detail::powr(1.0L - rk1, l - 1) - detail::powr(1.0L - rk, l - 1));

  auto tau = [&](long long l, long long m, long long q, long long a, long long b) {
    return detail::powr(1.0L - rho[a], m - l - q) * detail::powr(1.0L - rho[a] / rho[b], q);
  };

  VarianceParts out;

  detail::Accumulator v4;
  for (long long l = 1; l <= n - k; ++l) v4.add(binom(n - l, k) * (mu[l] - mu[l] * mu[l]));
  out.v4 = v4.value();

  detail::Accumulator v3;
  for (long long l = 1; l <= n - k; ++l) {
    for (long long j = kp + 1; j <= k; ++j) {
      const real pairs = binom(n - l, 2 * k + 1 - j) * binom(2 * k + 1 - j, k) * binom(k, j - 1);
      if (pairs == 0.0L) continue;
      const real both_up = detail::powr(1.0L - 2 * rk1 + rk1 * rk1 / rho[j], l - 1);
      const real both_down = detail::powr(1.0L - 2 * rk + rk * rk / rho[j - 1], l - 1);
      const real mixed = detail::powr(1.0L - rk - rk1 + rk * rk1 / rho[j - 1], l - 1);
      v3.add(pairs * (rp2 / rho_plus[j] * (both_up + both_down - 2 * mixed) - mu[l] * mu[l]));
    }
  }
  out.v3 = v3.value();

  detail::Accumulator v1, v2;
  for (long long l = 1; l <= n - k - 1; ++l) {
    for (long long m = l + 1; m <= n - k; ++m) {
      const real mumu = mu[l] * mu[m];
      for (long long j = kp + 1; j <= k; ++j) {
        const real zz = rp2 / rho_plus[j];
        // t-side up (a = k+1) shares j vertices with s in both families
        const real up_terms = detail::powr(1.0L - 2 * rk1 + rk1 * rk1 / rho[j], l - 1) -
                              detail::powr(1.0L - rk1 - rk + rk * rk1 / rho[j], l - 1);
        // t-side down (a = k): t minus min(t) meets s in j-1 vertices when
        // min(t) is in s, in j otherwise
        const real down_plus = detail::powr(1.0L - 2 * rk + rk * rk / rho[j - 1], l - 1) -
                               detail::powr(1.0L - rk1 - rk + rk1 * rk / rho[j - 1], l - 1);
        const real down_minus = detail::powr(1.0L - 2 * rk + rk * rk / rho[j], l - 1) -
                                detail::powr(1.0L - rk1 - rk + rk1 * rk / rho[j], l - 1);
        for (long long q = 1; q <= std::min(k + 1, m - l); ++q) {
          const real spread = binom(n - m, 2 * k + 1 - j - q) * binom(2 * k + 1 - j - q, k) * binom(m - l - 1, q - 1);
          if (spread == 0.0L) continue;
          const real up_part = zz * tau(l, m, q, k + 1, j) * up_terms;
          const real c_plus = spread * binom(k, j - 1);
          const real c_minus = spread * binom(k, j);
          if (c_plus != 0.0L) v1.add(2 * c_plus * (zz * tau(l, m, q, k, j - 1) * down_plus + up_part - mumu));
          if (c_minus != 0.0L) v2.add(2 * c_minus * (zz * tau(l, m, q, k, j) * down_minus + up_part - mumu));
        }
      }
    }
  }
  out.v1 = v1.value();
  out.v2 = v2.value();
  return out;
}

// Limiting correlation of the standardised critical counts in dimensions
// k = k' + i and r = k' + j.
inline real limiting_covariance(const ModelParams& params, long long i, long long j) {
  const auto kp = static_cast<long long>(params.k_prime());
  const auto d = static_cast<long long>(params.d());
  if (i > j) std::swap(i, j);
  if (i < 1 || kp + j > d)
    throw std::out_of_range("component indices must satisfy 1 <= i <= j <= d - k' = " + std::to_string(d - kp));
  if (i == j) return 1.0L;
  const RhoTable t(params);
  const long long k = kp + i, r = kp + j;
  const real a = t.rho(k + 1), b = t.rho(r + 1), base = t.rho(kp + 1);
  const real num = a * b * std::sqrt((2 - a) * (2 - b) * (2 - a / base) * (2 - b / base));
  const real den = (a + b - a * b / base) * (a + b - a * b);
  return den > 0.0L ? num / den : 0.0L;
}

// The upper bound 4 rho rho' / (rho + rho')^2 on the off-diagonal limit.
inline real limiting_covariance_bound(const ModelParams& params, long long i, long long j) {
  const auto kp = static_cast<long long>(params.k_prime());
  const RhoTable t(params);
  const real a = t.rho(kp + i + 1), b = t.rho(kp + j + 1);
  return a + b > 0.0L ? 4 * a * b / ((a + b) * (a + b)) : 0.0L;
}

// Components i = 1..d-k' (sizes k'+2 .. d+1).
inline std::vector<std::vector<real>> limiting_covariance_matrix(const ModelParams& params) {
  const long long dim = static_cast<long long>(params.d()) - static_cast<long long>(params.k_prime());
  std::vector<std::vector<real>> sigma(dim, std::vector<real>(dim, 0.0L));
  for (long long i = 1; i <= dim; ++i)
    for (long long j = 1; j <= dim; ++j) sigma[i - 1][j - 1] = limiting_covariance(params, i, j);
  return sigma;
}

struct MomentReport {
  long long k = 0;
  real mean = 0;
  MeanBounds mean_bounds{};
  VarianceParts variance;
  std::vector<std::vector<real>> sigma_inf;
};

inline MomentReport moment_report(const ModelParams& params, long long k) {
  MomentReport r;
  r.k = k;
  r.mean = critical_mean_exact(params, k);
  r.mean_bounds = critical_mean_bounds(params, k);
  r.variance = critical_variance_exact(params, k);
  if (params.d() > params.k_prime()) r.sigma_inf = limiting_covariance_matrix(params);
  return r;
}

struct MleScaling {
  real scale;      // sqrt(C(n, i+1) P_i)
  real limit_var;  // p_i (1 - p_i)
  real hollow_probability;
};

inline MleScaling mle_scaling(const ModelParams& params, long long i) {
  if (i < 1 || i > static_cast<long long>(params.d())) throw std::out_of_range("mle_scaling needs 1 <= i <= d");
  const RhoTable t(params);
  const real pi = t.p(i);
  const real hollow = t.hollow_probability(i);
  return {std::sqrt(binom(static_cast<long long>(params.n()), i + 1) * hollow), pi * (1 - pi), hollow};
}

}  // namespace sgof
