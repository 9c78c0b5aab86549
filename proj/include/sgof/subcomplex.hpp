#pragma once

// Copies of a fixed connected pattern complex L on [m] inside an observed
// complex, counted over all m-subsets and all members of the isomorphism
// class [L], with exact first and second moments under X(n, p).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgof/complex.hpp"
#include "sgof/models.hpp"
#include "sgof/numeric.hpp"

namespace sgof {

inline constexpr std::size_t kMaxPatternVertices = 8;
inline constexpr std::size_t kMaxOverlapPairs = 20'000'000;

// A complex on [m] as bitmasks over positions 0..m-1; singletons are implicit.
using PatternMask = std::uint32_t;
using PatternMembers = std::vector<std::vector<PatternMask>>;

class PatternComplex {
 public:
  explicit PatternComplex(const SimplicialComplex& base) : base_(base), m_(base.vertex_count()) {
    if (m_ < 1) throw std::invalid_argument("empty pattern");
    if (m_ > kMaxPatternVertices)
      throw std::invalid_argument("pattern has " + std::to_string(m_) + " vertices; at most " +
                                  std::to_string(kMaxPatternVertices) + " supported");
    for (std::size_t k = 2; k <= base.max_size(); ++k)
      for (std::size_t i = 0; i < base.count(k); ++i) {
        PatternMask mask = 0;
        for (Vertex v : base.simplex(k, i)) mask |= PatternMask{1} << (v - 1);
        masks_.push_back(mask);
      }
    std::sort(masks_.begin(), masks_.end());
    if (!connected()) throw std::invalid_argument("pattern complex must be connected");
  }

  const SimplicialComplex& base() const { return base_; }
  std::size_t vertices() const { return m_; }
  const std::vector<PatternMask>& masks() const { return masks_; }

  // e[i] = number of i-simplices, i = 0..dim.
  std::vector<std::size_t> simplex_counts() const {
    std::vector<std::size_t> e(base_.max_size(), 0);
    for (std::size_t k = 1; k <= base_.max_size(); ++k) e[k - 1] = base_.count(k);
    return e;
  }

  int dimension() const { return base_.dimension(); }

 private:
  bool connected() const {
    PatternMask reached = 1;
    for (bool grew = true; grew;) {
      grew = false;
      for (PatternMask s : masks_)
        if ((s & reached) && (s & ~reached)) {
          reached |= s;
          grew = true;
        }
    }
    return reached == (PatternMask{1} << m_) - 1;
  }

  SimplicialComplex base_;
  std::size_t m_;
  std::vector<PatternMask> masks_;
};

inline PatternMask permute_mask(PatternMask mask, const std::vector<std::size_t>& perm) {
  PatternMask out = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (mask >> i & 1u) out |= PatternMask{1} << perm[i];
  return out;
}

// Every distinct relabelling of L under permutations of [m], each as a sorted
// mask list. The first member is L itself.
inline PatternMembers iso_class(const PatternComplex& l) {
  std::vector<std::size_t> perm(l.vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<PatternMask>> seen;
  PatternMembers members;
  do {
    std::vector<PatternMask> image;
    image.reserve(l.masks().size());
    for (PatternMask s : l.masks()) image.push_back(permute_mask(s, perm));
    std::sort(image.begin(), image.end());
    if (seen.insert(image).second) members.push_back(std::move(image));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return members;
}

inline SimplicialComplex member_complex(std::size_t m, const std::vector<PatternMask>& member) {
  std::vector<std::vector<Vertex>> facets;
  for (Vertex v = 1; v <= m; ++v) facets.push_back({v});
  for (PatternMask s : member) {
    std::vector<Vertex> f;
    for (std::size_t i = 0; i < m; ++i)
      if (s >> i & 1u) f.push_back(static_cast<Vertex>(i + 1));
    facets.push_back(std::move(f));
  }
  return build_from_facets(m, facets);
}

// T_L: number of pairs (s, L') with s an m-subset of [n], L' in [L] and the
// order-preserving copy L'[s] contained in k.
inline std::uint64_t count_subcomplexes(const SimplicialComplex& k, const PatternComplex& l,
                                        const PatternMembers& members) {
  const std::size_t n = k.vertex_count();
  const std::size_t m = l.vertices();
  if (m > n) return 0;

  // precompute, per member, the edge masks (pairs of positions) and the
  // higher simplices as position lists
  struct Member {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::vector<std::size_t>> higher;
  };
  std::vector<Member> prepared;
  for (const auto& mem : members) {
    Member p;
    for (PatternMask s : mem) {
      std::vector<std::size_t> pos;
      for (std::size_t i = 0; i < m; ++i)
        if (s >> i & 1u) pos.push_back(i);
      if (pos.size() == 2) p.edges.emplace_back(pos[0], pos[1]);
      else p.higher.push_back(std::move(pos));
    }
    prepared.push_back(std::move(p));
  }

  std::uint64_t total = 0;
  std::vector<Vertex> s(m);
  std::vector<Vertex> probe;
  for (std::size_t i = 0; i < m; ++i) s[i] = static_cast<Vertex>(i + 1);
  const auto& adj = k.adjacency();
  while (true) {
    for (const auto& p : prepared) {
      bool ok = true;
      for (auto [a, b] : p.edges)
        if (!adj.adjacent(s[a], s[b])) {
          ok = false;
          break;
        }
      for (std::size_t h = 0; ok && h < p.higher.size(); ++h) {
        probe.clear();
        for (std::size_t pos : p.higher[h]) probe.push_back(s[pos]);
        ok = k.contains(probe);
      }
      if (ok) ++total;
    }
    // next m-combination of [n] in lexicographic order
    std::size_t i = m;
    while (i > 0 && s[i - 1] == n - m + i) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < m; ++j) s[j] = s[j - 1] + 1;
  }
  return total;
}

inline std::uint64_t count_subcomplexes(const SimplicialComplex& k, const PatternComplex& l) {
  return count_subcomplexes(k, l, iso_class(l));
}

namespace detail {

// prod over the simplices of a mask family of p_{|s|-1}
inline real family_probability(const std::vector<PatternMask>& family, const ModelParams& params) {
  real prob = 1.0L;
  for (PatternMask s : family) prob *= static_cast<real>(params.p(static_cast<std::size_t>(std::popcount(s)) - 1));
  return prob;
}

}  // namespace detail

inline real expected_count(const PatternComplex& l, const PatternMembers& members, const ModelParams& params) {
  return binom(static_cast<long long>(params.n()), static_cast<long long>(l.vertices())) *
         static_cast<real>(members.size()) * detail::family_probability(l.masks(), params);
}

inline real expected_count(const PatternComplex& l, const ModelParams& params) {
  return expected_count(l, iso_class(l), params);
}

// Cov(X_s, X_u) for an l-set s and an m-set u sharing `overlap` vertices,
// where X_s counts copies of members of [L] on s. It does not depend on n.
inline real overlap_kernel(const PatternComplex& l, const PatternMembers& lm, const PatternComplex& mpat,
                           const PatternMembers& mm, std::size_t overlap, const ModelParams& params) {
  const std::size_t ml = l.vertices();
  const std::size_t mmv = mpat.vertices();
  if (overlap > std::min(ml, mmv)) throw std::invalid_argument("overlap exceeds pattern size");
  if (lm.size() * mm.size() > kMaxOverlapPairs) throw std::length_error("overlap enumeration exceeds cap");
  // s occupies ground positions 0..ml-1, u occupies ml-overlap..ml+mmv-overlap-1
  const std::size_t shift = ml - overlap;
  real joint = 0.0L;
  std::vector<PatternMask> uni;
  for (const auto& a : lm) {
    for (const auto& b : mm) {
      uni.assign(a.begin(), a.end());
      for (PatternMask t : b) uni.push_back(t << shift);
      std::sort(uni.begin(), uni.end());
      uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
      joint += detail::family_probability(uni, params);
    }
  }
  const real ea = static_cast<real>(lm.size()) * detail::family_probability(l.masks(), params);
  const real eb = static_cast<real>(mm.size()) * detail::family_probability(mpat.masks(), params);
  return joint - ea * eb;
}

// Exact Cov(T_L, T_M) under X(n, p): pairs (s, u) with |s n u| = a number
// C(n, m_L) C(m_L, a) C(n - m_L, m_M - a); overlaps of at most k'+1 vertices
// share no random simplex.
inline real exact_covariance(const PatternComplex& l, const PatternComplex& m, const ModelParams& params) {
  const PatternMembers lm = iso_class(l);
  const PatternMembers mm = iso_class(m);
  const auto n = static_cast<long long>(params.n());
  const auto ml = static_cast<long long>(l.vertices());
  const auto mmv = static_cast<long long>(m.vertices());
  real cov = 0.0L;
  const long long lo = static_cast<long long>(params.k_prime()) + 2;
  for (long long a = lo; a <= std::min(ml, mmv); ++a) {
    const real pairs = binom(n, ml) * binom(ml, a) * binom(n - ml, mmv - a);
    if (pairs == 0.0L) continue;
    cov += pairs * overlap_kernel(l, lm, m, mm, static_cast<std::size_t>(a), params);
  }
  return cov;
}

// Common patterns: the full simplex on m vertices, and complexes given by facets.
inline PatternComplex simplex_pattern(std::size_t m) {
  std::vector<Vertex> all(m);
  std::iota(all.begin(), all.end(), Vertex{1});
  return PatternComplex(build_from_facets(m, {all}));
}

inline PatternComplex pattern_from_facets(std::size_t m, const std::vector<std::vector<Vertex>>& facets) {
  return PatternComplex(build_from_facets(m, facets));
}

}  // namespace sgof
