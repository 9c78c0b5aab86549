#pragma once

#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sgof/sgof.hpp"

namespace testing_helpers {

inline oracle::Mask to_mask(std::span<const sgof::Vertex> vs) {
  oracle::Mask m = 0;
  for (auto v : vs) m |= oracle::Mask{1} << (v - 1);
  return m;
}

inline oracle::MaskComplex to_masks(const sgof::SimplicialComplex& c) {
  oracle::MaskComplex k;
  k.n = static_cast<int>(c.vertex_count());
  for (std::size_t size = 1; size <= c.max_size(); ++size)
    for (std::size_t i = 0; i < c.count(size); ++i) k.faces.insert(to_mask(c.simplex(size, i)));
  return k;
}

inline sgof::SimplicialComplex from_masks(const oracle::MaskComplex& k) {
  std::vector<std::vector<sgof::Vertex>> facets;
  for (oracle::Mask m : k.faces) {
    std::vector<sgof::Vertex> f;
    for (int v = 0; v < k.n; ++v)
      if (m >> v & 1u) f.push_back(static_cast<sgof::Vertex>(v + 1));
    facets.push_back(f);
  }
  return sgof::build_from_facets(static_cast<std::size_t>(k.n), facets);
}

// random valid p of length d with entries in [lo, 1)
inline std::vector<double> random_p(std::mt19937_64& g, int d, double lo = 0.15) {
  std::uniform_real_distribution<double> u(lo, 0.95);
  std::vector<double> p(d);
  for (auto& x : p) x = u(g);
  return p;
}

inline sgof::SimplicialComplex small_fixture() {
  return sgof::build_from_facets(5, std::vector<std::vector<sgof::Vertex>>{{1, 2}, {2, 3}, {1, 4}, {3, 5}, {3, 4, 5}});
}

// connected patterns on at most 4 vertices
inline std::vector<sgof::PatternComplex> small_patterns() {
  using namespace sgof;
  return {
      simplex_pattern(2),
      pattern_from_facets(3, {{1, 2}, {2, 3}}),
      pattern_from_facets(3, {{1, 2}, {2, 3}, {1, 3}}),
      simplex_pattern(3),
      pattern_from_facets(4, {{1, 2}, {1, 3}, {1, 4}}),
      pattern_from_facets(4, {{1, 2}, {2, 3}, {3, 4}}),
      pattern_from_facets(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}),
      pattern_from_facets(4, {{1, 2, 3}, {3, 4}}),
      pattern_from_facets(4, {{1, 2, 3}, {2, 3, 4}}),
      simplex_pattern(4),
  };
}

// Copies of L in K: injective maps [m] -> [n] carrying every simplex of L into
// K, divided by the automorphism count (injective maps L -> L).
inline std::uint64_t brute_count(const sgof::SimplicialComplex& k, const sgof::PatternComplex& l) {
  const auto mk = to_masks(k);
  const int n = static_cast<int>(k.vertex_count()), m = static_cast<int>(l.vertices());
  std::set<oracle::Mask> lfaces(l.masks().begin(), l.masks().end());
  std::vector<int> img(m);
  auto image = [&](oracle::Mask s) {
    oracle::Mask out = 0;
    for (int i = 0; i < m; ++i)
      if (s >> i & 1u) out |= oracle::Mask{1} << img[i];
    return out;
  };
  std::uint64_t maps = 0, autos = 0;
  std::function<void(int, oracle::Mask)> rec = [&](int i, oracle::Mask used) {
    if (i == m) {
      bool ok = true;
      for (auto s : l.masks()) ok = ok && mk.has(image(s));
      if (ok) ++maps;
      return;
    }
    for (int v = 0; v < n; ++v)
      if (!(used >> v & 1u)) {
        img[i] = v;
        rec(i + 1, used | oracle::Mask{1} << v);
      }
  };
  rec(0, 0);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    img = perm;
    bool ok = true;
    for (auto s : l.masks()) ok = ok && lfaces.count(image(s));
    if (ok) ++autos;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return maps / autos;
}

}  // namespace testing_helpers
