#pragma once

// Random simplicial complex models: the multi-parameter model X(n, p) and the
// soft random geometric complexes on uniform points in the unit cube.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgof/complex.hpp"
#include "sgof/rng.hpp"

namespace sgof {

// Inclusion probabilities p_1, p_2, ... of X(n, p); p_i applies to i-simplices.
class ModelParams {
 public:
  ModelParams() = default;

  ModelParams(std::size_t n, std::vector<double> p) : n_(n), p_(std::move(p)) {
    if (n_ < 1) throw std::invalid_argument("model needs at least one vertex");
    for (double q : p_)
      if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("probabilities must lie in [0,1]");
    while (!p_.empty() && p_.back() == 0.0) p_.pop_back();
    for (double q : p_)
      if (q == 0.0) throw std::invalid_argument("zero probability below a positive one");
    k_prime_ = 0;
    while (k_prime_ < p_.size() && p_[k_prime_] == 1.0) ++k_prime_;
  }

  std::size_t n() const { return n_; }

  // p_i, zero above d.
  double p(std::size_t i) const { return i >= 1 && i <= p_.size() ? p_[i - 1] : 0.0; }

  // Largest i with p_i > 0.
  std::size_t d() const { return p_.size(); }

  // Largest k with p_1 = ... = p_k = 1.
  std::size_t k_prime() const { return k_prime_; }

  // min over i <= d of p_i.
  double p_star() const {
    double m = 1.0;
    for (double q : p_) m = std::min(m, q);
    return m;
  }

  const std::vector<double>& probabilities() const { return p_; }

 private:
  std::size_t n_ = 1;
  std::vector<double> p_;
  std::size_t k_prime_ = 0;
};

namespace detail {

inline constexpr std::uint64_t kPointStream = 0xffffffff00000001ULL;

// Layered sampler shared by both models: `prob(size, vertices)` gives the
// inclusion probability of a candidate whose facets are all present, and
// `max_size` caps the layers tried.
template <typename Prob>
SimplicialComplex sample_layers(std::size_t n, std::size_t max_size, Seed seed, Prob&& prob) {
  SimplicialComplex::Builder builder(n);
  std::vector<Vertex> layer;
  for (std::size_t size = 2; size <= max_size && size <= n; ++size) {
    const CounterRng rng(seed, size);
    layer.clear();
    std::uint64_t rank = 0;
    for_each_hollow_candidate(builder.current(), size, [&](std::span<const Vertex> cand) {
      const double q = prob(size, cand);
      if (q >= 1.0 || (q > 0.0 && rng.uniform(rank) < q)) layer.insert(layer.end(), cand.begin(), cand.end());
      ++rank;
    });
    builder.add_layer(layer);
    if (layer.empty()) break;
  }
  return std::move(builder).build();
}

}  // namespace detail

inline SimplicialComplex sample_multiparameter(const ModelParams& params, Seed seed) {
  return detail::sample_layers(params.n(), params.d() + 1, seed,
                               [&](std::size_t size, std::span<const Vertex>) { return params.p(size - 1); });
}

// ---------------------------------------------------------------------------
// Geometry

using Point = std::vector<double>;

struct PointCloud {
  std::size_t dim = 0;
  std::vector<Point> points;  // points[v - 1] is vertex v
};

// k-dimensional volume of the simplex spanned by k+1 points, sqrt(det G) / k!
// with G the Gram matrix of the edge vectors from the first point.
inline double simplex_volume(std::span<const Point> pts) {
  if (pts.empty()) throw std::invalid_argument("simplex_volume needs at least one point");
  const std::size_t k = pts.size() - 1;
  if (k == 0) return 1.0;
  const std::size_t dim = pts[0].size();
  for (const auto& q : pts)
    if (q.size() != dim) throw std::invalid_argument("points have different dimensions");
  if (dim < k) throw std::invalid_argument("ambient dimension smaller than simplex dimension");
  Eigen::MatrixXd edges(dim, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < dim; ++c) edges(c, j) = pts[j + 1][c] - pts[0][c];
  const double det = (edges.transpose() * edges).determinant();
  double fact = 1.0;
  for (std::size_t j = 2; j <= k; ++j) fact *= static_cast<double>(j);
  return det > 0.0 ? std::sqrt(det) / fact : 0.0;
}

inline double triangle_area(const Point& a, const Point& b, const Point& c) {
  if (a.size() != b.size() || a.size() != c.size())
    throw std::invalid_argument("points have different dimensions");
  double uu = 0, vv = 0, uv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = b[i] - a[i];
    const double v = c[i] - a[i];
    uu += u * u;
    vv += v * v;
    uv += u * v;
  }
  const double det = uu * vv - uv * uv;
  return det > 0.0 ? 0.5 * std::sqrt(det) : 0.0;
}

// ---------------------------------------------------------------------------
// Soft geometric kernels

enum class Measure { distance, area, volume };

inline std::size_t measure_arity(Measure m) {
  switch (m) {
    case Measure::distance: return 2;
    case Measure::area: return 3;
    case Measure::volume: return 4;
  }
  return 0;
}

inline std::string to_string(Measure m) {
  switch (m) {
    case Measure::distance: return "distance";
    case Measure::area: return "area";
    case Measure::volume: return "volume";
  }
  return "?";
}

// One inclusion function phi_i: either a constant, or the interpolated
// threshold 1{A <= eps1} + 0.5 * 1{eps1 < A < eps2} on a geometric measure A.
struct InclusionFunction {
  enum class Kind { constant, threshold };

  Kind kind = Kind::constant;
  double value = 0.0;
  Measure measure = Measure::distance;
  double eps1 = 0.0;
  double eps2 = 0.0;

  static InclusionFunction constant(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("constant kernel outside [0,1]");
    return {Kind::constant, c, Measure::distance, 0.0, 0.0};
  }

  static InclusionFunction threshold(Measure m, double eps1, double eps2) {
    if (!(eps1 >= 0.0 && eps1 <= eps2)) throw std::invalid_argument("need 0 <= eps1 <= eps2");
    return {Kind::threshold, 0.0, m, eps1, eps2};
  }

  double operator()(std::span<const Point> pts) const {
    if (kind == Kind::constant) return value;
    double a = 0.0;
    switch (measure) {
      case Measure::distance: {
        double s = 0.0;
        for (std::size_t i = 0; i < pts[0].size(); ++i) s += (pts[0][i] - pts[1][i]) * (pts[0][i] - pts[1][i]);
        a = std::sqrt(s);
        break;
      }
      case Measure::area: a = triangle_area(pts[0], pts[1], pts[2]); break;
      case Measure::volume: a = simplex_volume(pts); break;
    }
    if (a <= eps1) return 1.0;
    if (a < eps2) return 0.5;
    return 0.0;
  }
};

// phi_1, ..., phi_m for the listed dimensions, then `tail` for every higher one.
struct GeometricKernel {
  std::vector<InclusionFunction> phi;
  std::optional<InclusionFunction> tail;

  const InclusionFunction& at(std::size_t i) const {
    if (i >= 1 && i <= phi.size()) return phi[i - 1];
    if (tail) return *tail;
    throw std::out_of_range("kernel missing for dimension " + std::to_string(i));
  }

  void validate() const {
    for (std::size_t i = 1; i <= phi.size(); ++i) {
      const auto& f = phi[i - 1];
      if (f.kind == InclusionFunction::Kind::threshold && measure_arity(f.measure) != i + 1)
        throw std::invalid_argument("measure " + to_string(f.measure) + " does not fit dimension " +
                                    std::to_string(i));
    }
    if (tail && tail->kind != InclusionFunction::Kind::constant)
      throw std::invalid_argument("tail kernel must be constant");
  }

  // Largest simplex size that can receive positive probability.
  std::size_t max_size(std::size_t n) const {
    if (tail && tail->value > 0.0) return n;
    std::size_t top = 1;
    for (std::size_t i = 1; i <= phi.size(); ++i) {
      const auto& f = phi[i - 1];
      if (f.kind == InclusionFunction::Kind::threshold || f.value > 0.0) top = i + 1;
      else break;
    }
    return top;
  }
};

inline PointCloud sample_points(std::size_t count, std::size_t dim, Seed seed) {
  const CounterRng rng(seed, detail::kPointStream);
  PointCloud cloud{dim, std::vector<Point>(count, Point(dim))};
  for (std::size_t v = 0; v < count; ++v)
    for (std::size_t c = 0; c < dim; ++c) cloud.points[v][c] = rng.uniform(v * dim + c);
  return cloud;
}

inline SimplicialComplex sample_on_points(const PointCloud& cloud, const GeometricKernel& kernel, Seed seed) {
  kernel.validate();
  const std::size_t n = cloud.points.size();
  std::vector<Point> pts;
  return detail::sample_layers(n, kernel.max_size(n), seed, [&](std::size_t size, std::span<const Vertex> cand) {
    const InclusionFunction& f = kernel.at(size - 1);
    if (f.kind == InclusionFunction::Kind::constant) return f.value;
    pts.clear();
    for (Vertex v : cand) pts.push_back(cloud.points[v - 1]);
    return f(pts);
  });
}

inline std::pair<PointCloud, SimplicialComplex> sample_soft_geometric(std::size_t cloud_size, std::size_t ambient_dim,
                                                                      const GeometricKernel& kernel, Seed seed) {
  kernel.validate();
  PointCloud cloud = sample_points(cloud_size, ambient_dim, seed);
  SimplicialComplex c = sample_on_points(cloud, kernel, seed);
  return {std::move(cloud), std::move(c)};
}

// ---------------------------------------------------------------------------
// The three interpolated geometric models of the simulation study.

enum class GeometricModel { tetra, tri, edge };

// Distance threshold giving the hard geometric graph an edge density of about
// one half in the unit 3-cube.
inline constexpr double kEdgeModelThreshold = 0.4924;

struct ModelSetup {
  std::size_t n;
  std::size_t ambient_dim;
  std::size_t fit_dimension;  // d used when fitting X(n, p) to samples
  GeometricKernel kernel;
};

inline ModelSetup geometric_model(GeometricModel model, double eps1, double eps2) {
  using F = InclusionFunction;
  switch (model) {
    case GeometricModel::tetra:
      return {150, 7, 3, {{F::constant(0.5), F::constant(0.5), F::threshold(Measure::volume, eps1, eps2)}, F::constant(0.0)}};
    case GeometricModel::tri:
      return {75, 3, 2, {{F::constant(0.5), F::threshold(Measure::area, eps1, eps2)}, F::constant(0.0)}};
    case GeometricModel::edge:
      return {75, 3, 3, {{F::threshold(Measure::distance, eps1, eps2)}, F::constant(0.5)}};
  }
  throw std::invalid_argument("unknown model");
}

inline GeometricModel parse_model(const std::string& s) {
  if (s == "tetra") return GeometricModel::tetra;
  if (s == "tri") return GeometricModel::tri;
  if (s == "edge") return GeometricModel::edge;
  throw std::invalid_argument("unknown model '" + s + "'");
}

inline std::string to_string(GeometricModel m) {
  switch (m) {
    case GeometricModel::tetra: return "tetra";
    case GeometricModel::tri: return "tri";
    case GeometricModel::edge: return "edge";
  }
  return "?";
}

// Monte-Carlo estimate of the distance r with P(|X - Y| <= r) = density for
// X, Y uniform in the unit cube of dimension `dim`. With `periodic` the cube
// is a torus (wrap-around distance), which removes the boundary effect.
inline double calibrate_distance_threshold(std::size_t dim, double density, std::size_t samples, Seed seed,
                                           bool periodic = false) {
  const CounterRng rng(seed, 0xca1b);
  std::vector<double> dist(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      double d = std::abs(rng.uniform(2 * (s * dim + c)) - rng.uniform(2 * (s * dim + c) + 1));
      if (periodic) d = std::min(d, 1.0 - d);
      acc += d * d;
    }
    dist[s] = std::sqrt(acc);
  }
  const auto idx = static_cast<std::size_t>(density * static_cast<double>(samples - 1));
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(idx), dist.end());
  return dist[idx];
}

}  // namespace sgof
