#pragma once

// Text format: one facet per line as whitespace-separated 1-based vertices.
// '#' starts a comment. The first content line may be "n <N>" to fix the
// vertex count; otherwise n is the largest index seen.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgof/complex.hpp"

namespace sgof {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool parse_index(const std::string& tok, std::uint64_t& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace detail

inline SimplicialComplex read_complex(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  std::size_t declared = 0;
  std::uint64_t max_seen = 0;
  std::vector<std::vector<Vertex>> facets;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (!seen_content && toks[0] == "n") {
      seen_content = true;
      std::uint64_t v = 0;
      if (toks.size() != 2 || !detail::parse_index(toks[1], v) || v == 0)
        throw ParseError(source, lineno, "header must read 'n <positive integer>'");
      declared = static_cast<std::size_t>(v);
      continue;
    }
    seen_content = true;
    std::vector<Vertex> f;
    for (const auto& t : toks) {
      std::uint64_t v = 0;
      if (!detail::parse_index(t, v) || v == 0 || v > 0xffffffffULL)
        throw ParseError(source, lineno, "invalid vertex '" + t + "'");
      if (declared && v > declared)
        throw ParseError(source, lineno, "vertex " + t + " exceeds n = " + std::to_string(declared));
      max_seen = std::max(max_seen, v);
      f.push_back(static_cast<Vertex>(v));
    }
    std::sort(f.begin(), f.end());
    if (std::adjacent_find(f.begin(), f.end()) != f.end())
      throw ParseError(source, lineno, "repeated vertex in facet");
    facets.push_back(std::move(f));
  }
  const std::size_t n = declared ? declared : static_cast<std::size_t>(max_seen);
  if (n == 0) throw ParseError(source, lineno, "no vertices");
  return build_from_facets(n, facets);
}

inline SimplicialComplex read_complex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_complex(in, path);
}

inline SimplicialComplex parse_complex(const std::string& text) {
  std::istringstream in(text);
  return read_complex(in, "<string>");
}

inline void write_complex(std::ostream& out, const SimplicialComplex& c) {
  out << "n " << c.vertex_count() << '\n';
  for (const Simplex& f : c.facets()) {
    bool first = true;
    for (Vertex v : f.vertices()) {
      out << (first ? "" : " ") << v;
      first = false;
    }
    out << '\n';
  }
}

inline std::string format_complex(const SimplicialComplex& c) {
  std::ostringstream out;
  write_complex(out, c);
  return out.str();
}

inline void write_complex_file(const std::string& path, const SimplicialComplex& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_complex(out, c);
}

}  // namespace sgof
