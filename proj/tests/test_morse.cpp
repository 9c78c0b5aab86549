#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace sgof;
using testing_helpers::small_fixture;

TEST(Morse, SmallFixtureMatching) {
  const auto k = small_fixture();
  Matching expect{{Simplex{2}, Simplex{1, 2}},
                  {Simplex{3}, Simplex{2, 3}},
                  {Simplex{4}, Simplex{1, 4}},
                  {Simplex{5}, Simplex{3, 5}},
                  {Simplex{4, 5}, Simplex{3, 4, 5}}};
  auto got = lexicographic_matching(k);
  auto key = [](const MatchedPair& a, const MatchedPair& b) { return a.face < b.face; };
  std::sort(got.begin(), got.end(), key);
  std::sort(expect.begin(), expect.end(), key);
  EXPECT_EQ(got, expect);
  EXPECT_TRUE(verify_acyclic(k, got));

  const auto c = critical_counts(k);
  EXPECT_EQ(c[1], 1u);
  EXPECT_EQ(c[2], 1u);
  EXPECT_EQ(c[3], 0u);
  EXPECT_EQ(classify_simplex(k, Simplex{1}), Pairing::critical);
  EXPECT_EQ(classify_simplex(k, Simplex{3, 4}), Pairing::critical);
  EXPECT_EQ(classify_simplex(k, Simplex{1, 2}), Pairing::matched_down);
  EXPECT_EQ(classify_simplex(k, Simplex{4, 5}), Pairing::matched_up);
  EXPECT_EQ(classify_simplex(k, Simplex{3, 4, 5}), Pairing::matched_down);
  EXPECT_EQ(classify_simplex(k, Simplex{5}), Pairing::matched_up);
  EXPECT_EQ(c.alternating_sum(), euler_characteristic(k));
  EXPECT_THROW(classify_simplex(k, Simplex{1, 3}), std::invalid_argument);
}

TEST(Morse, SingleSimplexHasOneCriticalVertex) {
  const auto k = build_from_facets(5, std::vector<std::vector<Vertex>>{{1, 2, 3, 4, 5}});
  const auto c = critical_counts(k);
  EXPECT_EQ(c[1], 1u);
  for (std::size_t s = 2; s <= 5; ++s) EXPECT_EQ(c[s], 0u);
}

TEST(Morse, HollowTriangleHasCriticalEdge) {
  const auto k = build_from_facets(3, std::vector<std::vector<Vertex>>{{1, 2}, {2, 3}, {1, 3}});
  EXPECT_EQ(classify_simplex(k, Simplex{2, 3}), Pairing::critical);
  EXPECT_EQ(critical_counts(k)[2], 1u);
}

TEST(Morse, CyclicMatchingDetected) {
  const auto k = build_from_facets(3, std::vector<std::vector<Vertex>>{{1, 2}, {2, 3}, {1, 3}});
  const Matching cyc{{Simplex{2}, Simplex{1, 2}}, {Simplex{1}, Simplex{1, 3}}, {Simplex{3}, Simplex{2, 3}}};
  EXPECT_FALSE(verify_acyclic(k, cyc));
  const Matching bad{{Simplex{2}, Simplex{1, 2}}, {Simplex{1}, Simplex{1, 2}}};
  EXPECT_THROW(verify_acyclic(k, bad), std::invalid_argument);
}

TEST(Morse, RandomComplexesAgreeWithDefinition) {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const auto p = testing_helpers::random_p(g, 1 + trial % 4, 0.3);
    const auto k = sample_multiparameter(ModelParams(n, p), Seed{static_cast<std::uint64_t>(trial), 7});
    const auto mk = testing_helpers::to_masks(k);

    const auto c = critical_counts(k);
    const auto oc = oracle::critical_counts(mk, static_cast<int>(k.max_size()));
    for (std::size_t s = 1; s <= k.max_size(); ++s) EXPECT_EQ(c[s], static_cast<std::uint64_t>(oc[s]));
    EXPECT_EQ(c.alternating_sum(), euler_characteristic(k));

    const auto m = lexicographic_matching(k);
    EXPECT_TRUE(verify_acyclic(k, m));
    std::set<Simplex> matched_up, matched_down;
    for (const auto& [f, cf] : m) matched_up.insert(f), matched_down.insert(cf);
    for (std::size_t s = 1; s <= k.max_size(); ++s)
      for (const auto& t : k.simplices(s)) {
        const auto want = matched_up.count(t) ? Pairing::matched_up
                          : matched_down.count(t) ? Pairing::matched_down
                                                  : Pairing::critical;
        EXPECT_EQ(classify_simplex(k, t), want) << t.to_string();
        EXPECT_EQ(want == Pairing::critical, oracle::is_critical(mk, testing_helpers::to_mask(t.vertices())));
      }
  }
}
