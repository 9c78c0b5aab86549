#pragma once

// Finite simplicial complexes on the vertex set [n] = {1, ..., n}.
//
// Simplices are sorted vertex sequences. A complex stores one hash table per
// simplex size ("layer") plus a neighbour bitset per vertex, which is what the
// counting kernels probe.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgof {

using Vertex = std::uint32_t;

class Simplex {
 public:
  Simplex() = default;

  explicit Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (vertices_.empty()) throw std::invalid_argument("simplex must be non-empty");
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw std::invalid_argument("simplex has repeated vertices");
    if (vertices_.front() == 0) throw std::invalid_argument("vertices are 1-based");
  }

  Simplex(std::initializer_list<Vertex> vertices) : Simplex(std::vector<Vertex>(vertices)) {}

  explicit Simplex(std::span<const Vertex> sorted)
      : Simplex(std::vector<Vertex>(sorted.begin(), sorted.end())) {}

  std::size_t size() const { return vertices_.size(); }
  int dimension() const { return static_cast<int>(vertices_.size()) - 1; }
  Vertex min() const { return vertices_.front(); }
  Vertex max() const { return vertices_.back(); }
  std::span<const Vertex> vertices() const { return vertices_; }
  Vertex operator[](std::size_t i) const { return vertices_[i]; }

  bool contains(Vertex v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }

  bool is_face_of(const Simplex& other) const {
    return std::includes(other.vertices_.begin(), other.vertices_.end(), vertices_.begin(),
                         vertices_.end());
  }

  Simplex with(Vertex v) const {
    std::vector<Vertex> out(vertices_);
    out.push_back(v);
    return Simplex(std::move(out));
  }

  Simplex without(Vertex v) const {
    std::vector<Vertex> out;
    out.reserve(vertices_.size());
    for (Vertex u : vertices_)
      if (u != v) out.push_back(u);
    return Simplex(std::move(out));
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(vertices_[i]);
    }
    return s + "}";
  }

  friend bool operator==(const Simplex&, const Simplex&) = default;
  friend auto operator<=>(const Simplex& a, const Simplex& b) {
    // size first, then lexicographic: the order layers are stored in
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.vertices_ <=> b.vertices_;
  }

 private:
  std::vector<Vertex> vertices_;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash_vertices(std::span<const Vertex> vs) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ vs.size();
  for (Vertex v : vs) h = mix64(h + v);
  return h;
}

// Fixed-length sorted vertex tuples in a flat array with an open-addressing
// index. Entries are kept in insertion order.
class SimplexTable {
 public:
  explicit SimplexTable(std::size_t width = 0) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return width_ == 0 ? 0 : data_.size() / width_; }

  std::span<const Vertex> at(std::size_t i) const {
    return {data_.data() + i * width_, width_};
  }

  bool contains(std::span<const Vertex> key) const {
    if (slots_.empty()) return false;
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t pos = hash_vertices(key) & mask;; pos = (pos + 1) & mask) {
      const std::uint32_t slot = slots_[pos];
      if (slot == kEmpty) return false;
      if (std::equal(key.begin(), key.end(), data_.begin() + slot * width_)) return true;
    }
  }

  // Appends without a duplicate check; call reindex() once all entries are in.
  void append(std::span<const Vertex> key) { data_.insert(data_.end(), key.begin(), key.end()); }

  void reindex() {
    const std::size_t count = size();
    slots_.assign(std::bit_ceil(std::max<std::size_t>(2 * count, 8)), kEmpty);
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t pos = hash_vertices(at(i)) & mask;
      while (slots_[pos] != kEmpty) pos = (pos + 1) & mask;
      slots_[pos] = static_cast<std::uint32_t>(i);
    }
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;
  std::size_t width_;
  std::vector<Vertex> data_;
  std::vector<std::uint32_t> slots_;
};

}  // namespace detail

// Per-vertex neighbour sets as bit rows; bit v of row u is set iff {u,v} is an edge.
class AdjacencyBits {
 public:
  AdjacencyBits() = default;
  explicit AdjacencyBits(std::size_t n)
      : n_(n), words_((n + 1 + 63) / 64), bits_((n + 1) * words_, 0) {}

  std::size_t words() const { return words_; }
  std::span<const std::uint64_t> row(Vertex u) const { return {bits_.data() + u * words_, words_}; }

  void connect(Vertex u, Vertex v) {
    bits_[u * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
    bits_[v * words_ + u / 64] |= std::uint64_t{1} << (u % 64);
  }

  bool adjacent(Vertex u, Vertex v) const {
    return (bits_[u * words_ + v / 64] >> (v % 64)) & 1u;
  }

  // Writes the common neighbours of all of `vs` into `out` (words() entries).
  void common(std::span<const Vertex> vs, std::span<std::uint64_t> out) const {
    auto first = row(vs[0]);
    std::copy(first.begin(), first.end(), out.begin());
    for (std::size_t i = 1; i < vs.size(); ++i) {
      auto r = row(vs[i]);
      for (std::size_t w = 0; w < words_; ++w) out[w] &= r[w];
    }
  }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Calls fn(v) for every set bit v with lo <= v < hi, in increasing order.
template <typename Fn>
void for_each_bit(std::span<const std::uint64_t> bits, std::size_t lo, std::size_t hi, Fn&& fn) {
  if (lo >= hi) return;
  for (std::size_t w = lo / 64; w * 64 < hi && w < bits.size(); ++w) {
    std::uint64_t word = bits[w];
    if (w == lo / 64) word &= ~std::uint64_t{0} << (lo % 64);
    while (word) {
      const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
      if (v >= hi) return;
      fn(static_cast<Vertex>(v));
      word &= word - 1;
    }
  }
}

class SimplicialComplex {
 public:
  class Builder;

  SimplicialComplex() = default;

  std::size_t vertex_count() const { return n_; }

  // Largest simplex size present (1 for a complex without edges).
  std::size_t max_size() const { return layers_.empty() ? 0 : layers_.size() - 1; }
  int dimension() const { return static_cast<int>(max_size()) - 1; }

  // Number of simplices on `size` vertices; zero above the dimension.
  std::size_t count(std::size_t size) const {
    return size == 0 || size >= layers_.size() ? 0 : layers_[size].size();
  }

  // The `index`-th simplex on `size` vertices, in lexicographic order.
  std::span<const Vertex> simplex(std::size_t size, std::size_t index) const {
    return layers_[size].at(index);
  }

  bool contains(std::span<const Vertex> sorted) const {
    const std::size_t k = sorted.size();
    if (k == 0 || k >= layers_.size()) return false;
    if (sorted.back() > n_ || sorted.front() == 0) return false;
    if (k == 1) return true;
    if (k == 2) return adjacency_.adjacent(sorted[0], sorted[1]);
    return layers_[k].contains(sorted);
  }

  bool contains(const Simplex& s) const { return contains(s.vertices()); }

  const AdjacencyBits& adjacency() const { return adjacency_; }

  std::vector<Simplex> simplices(std::size_t size) const {
    std::vector<Simplex> out;
    out.reserve(count(size));
    for (std::size_t i = 0; i < count(size); ++i) out.emplace_back(simplex(size, i));
    return out;
  }

  // Inclusion-maximal simplices, sorted by vertex sequence.
  std::vector<Simplex> facets() const;

  friend bool operator==(const SimplicialComplex& a, const SimplicialComplex& b) {
    if (a.n_ != b.n_ || a.max_size() != b.max_size()) return false;
    for (std::size_t k = 1; k <= a.max_size(); ++k) {
      if (a.count(k) != b.count(k)) return false;
      for (std::size_t i = 0; i < a.count(k); ++i)
        if (!b.contains(a.simplex(k, i))) return false;
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<detail::SimplexTable> layers_;  // layers_[k]: simplices on k vertices
  AdjacencyBits adjacency_;
};

// Assembles a complex one layer at a time, in increasing simplex size. Each
// layer must be lexicographically sorted and consist of sets whose facets are
// all present in the previous layers.
class SimplicialComplex::Builder {
 public:
  explicit Builder(std::size_t n) {
    c_.n_ = n;
    c_.adjacency_ = AdjacencyBits(n);
    c_.layers_.emplace_back(0);
    detail::SimplexTable singletons(1);
    for (Vertex v = 1; v <= n; ++v) singletons.append(std::span<const Vertex>(&v, 1));
    singletons.reindex();
    c_.layers_.push_back(std::move(singletons));
  }

  // The complex assembled so far; valid for queries between add_layer calls.
  const SimplicialComplex& current() const { return c_; }

  std::size_t next_size() const { return c_.layers_.size(); }

  void add_layer(const std::vector<Vertex>& flat) {
    const std::size_t k = next_size();
    if (flat.size() % k != 0) throw std::logic_error("layer size mismatch");
    if (flat.empty()) {
      done_ = true;
      return;
    }
    if (done_) throw std::logic_error("layer added above an empty layer");
    detail::SimplexTable table(k);
    for (std::size_t i = 0; i < flat.size(); i += k) {
      std::span<const Vertex> s(flat.data() + i, k);
      table.append(s);
      if (k == 2) c_.adjacency_.connect(s[0], s[1]);
    }
    table.reindex();
    c_.layers_.push_back(std::move(table));
  }

  SimplicialComplex build() && { return std::move(c_); }

 private:
  SimplicialComplex c_;
  bool done_ = false;
};

// Enumerates, in lexicographic order, every set on `size` vertices (size >= 2)
// all of whose facets lie in `c`. Such a set is reached exactly once, by
// extending its facet without the largest vertex.
template <typename Fn>
void for_each_hollow_candidate(const SimplicialComplex& c, std::size_t size, Fn&& fn) {
  const std::size_t n = c.vertex_count();
  std::vector<Vertex> cand(size);
  if (size < 2) return;
  if (size == 2) {
    for (Vertex u = 1; u <= n; ++u)
      for (Vertex v = u + 1; v <= n; ++v) {
        cand[0] = u;
        cand[1] = v;
        fn(std::span<const Vertex>(cand));
      }
    return;
  }
  const std::size_t base = size - 1;
  std::vector<std::uint64_t> common(c.adjacency().words());
  std::vector<Vertex> facet(base);
  for (std::size_t i = 0; i < c.count(base); ++i) {
    auto s = c.simplex(base, i);
    c.adjacency().common(s, common);
    for_each_bit(common, s.back() + 1, n + 1, [&](Vertex v) {
      std::copy(s.begin(), s.end(), cand.begin());
      cand[base] = v;
      // edges to v are implied by the adjacency mask; larger facets through v
      // need a lookup
      if (size > 3) {
        for (std::size_t drop = 0; drop < base; ++drop) {
          std::size_t w = 0;
          for (std::size_t j = 0; j < size; ++j)
            if (j != drop) facet[w++] = cand[j];
          if (!c.contains(facet)) return;
        }
      }
      fn(std::span<const Vertex>(cand));
    });
  }
}

inline SimplicialComplex build_from_facets(std::size_t n, const std::vector<std::vector<Vertex>>& facets) {
  std::vector<std::vector<Vertex>> sorted;
  std::size_t top = 1;
  for (const auto& f : facets) {
    if (f.empty()) throw std::invalid_argument("empty facet");
    for (Vertex v : f)
      if (v < 1 || v > n)
        throw std::out_of_range("vertex " + std::to_string(v) + " outside [1," + std::to_string(n) + "]");
    std::vector<Vertex> s(f);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.size() > 63) throw std::invalid_argument("facet too large");
    top = std::max(top, s.size());
    sorted.push_back(std::move(s));
  }

  // layer[k]: every k-subset of some facet, then sorted and deduplicated
  std::vector<std::vector<std::vector<Vertex>>> layers(top + 1);
  for (const auto& f : sorted) {
    const std::size_t m = f.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
      const auto k = static_cast<std::size_t>(std::popcount(mask));
      if (k < 2) continue;
      std::vector<Vertex> sub;
      sub.reserve(k);
      for (std::size_t j = 0; j < m; ++j)
        if (mask >> j & 1u) sub.push_back(f[j]);
      layers[k].push_back(std::move(sub));
    }
  }

  SimplicialComplex::Builder builder(n);
  for (std::size_t k = 2; k <= top; ++k) {
    auto& layer = layers[k];
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    std::vector<Vertex> flat;
    flat.reserve(layer.size() * k);
    for (const auto& s : layer) flat.insert(flat.end(), s.begin(), s.end());
    builder.add_layer(flat);
  }
  return std::move(builder).build();
}

inline SimplicialComplex build_from_facets(std::size_t n, const std::vector<Simplex>& facets) {
  std::vector<std::vector<Vertex>> raw;
  raw.reserve(facets.size());
  for (const auto& f : facets) raw.emplace_back(f.vertices().begin(), f.vertices().end());
  return build_from_facets(n, raw);
}

inline std::vector<Simplex> SimplicialComplex::facets() const {
  std::vector<Simplex> out;
  std::vector<std::uint64_t> common(adjacency_.words());
  std::vector<Vertex> up;
  for (std::size_t k = 1; k <= max_size(); ++k) {
    for (std::size_t i = 0; i < count(k); ++i) {
      auto s = simplex(k, i);
      bool maximal = true;
      if (k + 1 <= max_size()) {
        if (k == 1) {
          auto r = adjacency_.row(s[0]);
          maximal = std::all_of(r.begin(), r.end(), [](std::uint64_t w) { return w == 0; });
        } else {
          adjacency_.common(s, common);
          for (Vertex v = 1; v <= n_ && maximal; ++v) {
            if (!((common[v / 64] >> (v % 64)) & 1u)) continue;
            up.assign(s.begin(), s.end());
            up.insert(std::upper_bound(up.begin(), up.end(), v), v);
            if (contains(up)) maximal = false;
          }
        }
      }
      if (maximal) out.emplace_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const Simplex& a, const Simplex& b) {
    return std::lexicographical_compare(a.vertices().begin(), a.vertices().end(),
                                        b.vertices().begin(), b.vertices().end());
  });
  return out;
}

// Simplex counts s[i] and hollow-simplex counts h[i] by dimension i = 1..d.
// Index 0 is unused so that s[i] refers to i-simplices.
struct SkeletonCounts {
  std::vector<std::uint64_t> s;
  std::vector<std::uint64_t> h;
  int i_max = 0;  // largest i <= d with h[i] != 0
};

inline SkeletonCounts skeleton_counts(const SimplicialComplex& c, int d) {
  if (d < 1) throw std::invalid_argument("skeleton_counts needs d >= 1");
  SkeletonCounts out;
  out.s.assign(d + 1, 0);
  out.h.assign(d + 1, 0);
  for (int i = 1; i <= d; ++i) {
    const std::size_t size = static_cast<std::size_t>(i) + 1;
    out.s[i] = c.count(size);
    if (i == 1) {
      const std::uint64_t n = c.vertex_count();
      out.h[i] = n * (n - 1) / 2;
    } else if (c.count(size - 1) > 0) {
      std::uint64_t hollow = 0;
      for_each_hollow_candidate(c, size, [&](std::span<const Vertex>) { ++hollow; });
      out.h[i] = hollow;
    }
    if (out.h[i] != 0) out.i_max = i;
  }
  return out;
}

inline long long euler_characteristic(const SimplicialComplex& c) {
  long long chi = 0;
  for (std::size_t k = 1; k <= c.max_size(); ++k)
    chi += (k % 2 == 1 ? 1 : -1) * static_cast<long long>(c.count(k));
  return chi;
}

}  // namespace sgof
