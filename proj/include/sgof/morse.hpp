#pragma once

// Lexicographical acyclic partial matching and critical-simplex counts.
//
// A simplex s is paired upwards with s + {j}, j the smallest vertex below
// min(s) for which s + {j} is a simplex. Counting paths never materialise the
// matching; they use the closed-form test in classify_simplex.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgof/complex.hpp"

namespace sgof {

enum class Pairing { matched_up, matched_down, critical };

inline const char* to_string(Pairing p) {
  switch (p) {
    case Pairing::matched_up: return "matched_up";
    case Pairing::matched_down: return "matched_down";
    case Pairing::critical: return "critical";
  }
  return "?";
}

struct MatchedPair {
  Simplex face;
  Simplex coface;
  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

using Matching = std::vector<MatchedPair>;

namespace detail {

// Smallest j < below with {j} + rest in c (rest sorted, every vertex > j), or 0.
inline Vertex smallest_cone_vertex(const SimplicialComplex& c, std::span<const Vertex> rest, Vertex below,
                                   std::vector<std::uint64_t>& common, std::vector<Vertex>& probe) {
  c.adjacency().common(rest, common);
  Vertex found = 0;
  for_each_bit(common, 1, below, [&](Vertex j) {
    if (found) return;
    probe.resize(rest.size() + 1);
    probe[0] = j;
    std::copy(rest.begin(), rest.end(), probe.begin() + 1);
    if (rest.size() == 1 || c.contains(probe)) found = j;
  });
  return found;
}

class Classifier {
 public:
  explicit Classifier(const SimplicialComplex& c) : c_(c), common_(c.adjacency().words()) {}

  Pairing operator()(std::span<const Vertex> t) {
    const Vertex lo = t[0];
    if (smallest_cone_vertex(c_, t, lo, common_, probe_)) return Pairing::matched_up;
    if (t.size() == 1) return Pairing::critical;
    if (!smallest_cone_vertex(c_, t.subspan(1), lo, common_, probe_)) return Pairing::matched_down;
    return Pairing::critical;
  }

 private:
  const SimplicialComplex& c_;
  std::vector<std::uint64_t> common_;
  std::vector<Vertex> probe_;
};

}  // namespace detail

inline Pairing classify_simplex(const SimplicialComplex& c, const Simplex& t) {
  if (!c.contains(t)) throw std::invalid_argument("simplex " + t.to_string() + " is not in the complex");
  detail::Classifier classify(c);
  return classify(t.vertices());
}

// c[k] = number of critical simplices on k vertices, for k = 1..max_size
// (index 0 unused).
struct CriticalCounts {
  std::vector<std::uint64_t> by_size;

  std::uint64_t operator[](std::size_t k) const { return k < by_size.size() ? by_size[k] : 0; }

  long long alternating_sum() const {
    long long acc = 0;
    for (std::size_t k = 1; k < by_size.size(); ++k)
      acc += (k % 2 == 1 ? 1 : -1) * static_cast<long long>(by_size[k]);
    return acc;
  }
};

inline CriticalCounts critical_counts(const SimplicialComplex& c, std::size_t max_size) {
  CriticalCounts out;
  out.by_size.assign(max_size + 1, 0);
  detail::Classifier classify(c);
  for (std::size_t k = 1; k <= max_size; ++k)
    for (std::size_t i = 0; i < c.count(k); ++i)
      if (classify(c.simplex(k, i)) == Pairing::critical) ++out.by_size[k];
  return out;
}

inline CriticalCounts critical_counts(const SimplicialComplex& c) {
  return critical_counts(c, c.max_size());
}

// Pairs sorted by face (size, then lexicographic).
inline Matching lexicographic_matching(const SimplicialComplex& c) {
  Matching v;
  std::vector<std::uint64_t> common(c.adjacency().words());
  std::vector<Vertex> probe;
  std::map<Simplex, bool> used;
  for (std::size_t k = 1; k < c.max_size(); ++k) {
    for (std::size_t i = 0; i < c.count(k); ++i) {
      auto s = c.simplex(k, i);
      const Vertex j = detail::smallest_cone_vertex(c, s, s[0], common, probe);
      if (!j) continue;
      Simplex face(s);
      Simplex coface = face.with(j);
      // min I(s) is unique and j < min(s), so each coface has one candidate face
      if (used.contains(face) || used.contains(coface))
        throw std::logic_error("lexicographical matching reused a simplex");
      used.emplace(face, true);
      used.emplace(coface, true);
      v.push_back({std::move(face), std::move(coface)});
    }
  }
  return v;
}

// True iff `v` is a partial matching on `c` whose modified Hasse diagram (face
// incidences pointing down, matched pairs reversed) has no directed cycle.
// Throws std::invalid_argument if `v` is not a partial matching on `c`.
inline bool verify_acyclic(const SimplicialComplex& c, const Matching& v) {
  std::map<Simplex, std::size_t> index;
  std::vector<Simplex> cells;
  for (std::size_t k = 1; k <= c.max_size(); ++k)
    for (std::size_t i = 0; i < c.count(k); ++i) {
      index.emplace(Simplex(c.simplex(k, i)), cells.size());
      cells.emplace_back(c.simplex(k, i));
    }

  std::vector<std::ptrdiff_t> partner(cells.size(), -1);
  for (const auto& [face, coface] : v) {
    if (coface.size() != face.size() + 1 || !face.is_face_of(coface))
      throw std::invalid_argument("pair " + face.to_string() + "," + coface.to_string() + " is not an incidence");
    auto f = index.find(face);
    auto g = index.find(coface);
    if (f == index.end() || g == index.end()) throw std::invalid_argument("pair uses a simplex outside the complex");
    if (partner[f->second] != -1 || partner[g->second] != -1)
      throw std::invalid_argument("simplex appears in two pairs");
    partner[f->second] = static_cast<std::ptrdiff_t>(g->second);
    partner[g->second] = static_cast<std::ptrdiff_t>(f->second);
  }

  // adjacency of the modified Hasse diagram
  std::vector<std::vector<std::size_t>> out(cells.size());
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const Simplex& cell = cells[t];
    if (cell.size() < 2) continue;
    for (Vertex x : cell.vertices()) {
      const std::size_t s = index.at(cell.without(x));
      if (partner[s] == static_cast<std::ptrdiff_t>(t)) out[s].push_back(t);
      else out[t].push_back(s);
    }
  }

  // Kahn's algorithm
  std::vector<std::size_t> indeg(cells.size(), 0);
  for (const auto& targets : out)
    for (std::size_t t : targets) ++indeg[t];
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::size_t seen = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.back();
    queue.pop_back();
    ++seen;
    for (std::size_t t : out[u])
      if (--indeg[t] == 0) queue.push_back(t);
  }
  return seen == cells.size();
}

}  // namespace sgof
