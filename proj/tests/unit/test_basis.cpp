#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "permqfi/basis.hpp"
#include "permqfi/error.hpp"

using namespace permqfi;

namespace {

// Triples enumerated directly from the definition, no ordering assumed.
std::set<std::tuple<int, int, int>> brute_force_triples(int n) {
  std::set<std::tuple<int, int, int>> out;
  for (int two_j = n; two_j >= 0; two_j -= 2) {
    for (int two_n = -two_j; two_n <= two_j; two_n += 2) {
      for (int two_m = -two_j; two_m <= two_j; two_m += 2) out.emplace(two_j, two_n, two_m);
    }
  }
  return out;
}

}  // namespace

TEST(SpinLengths, SmallSystems) {
  EXPECT_EQ(spin_lengths(2), (std::vector<int>{2, 0}));
  EXPECT_EQ(spin_lengths(3), (std::vector<int>{3, 1}));
  const auto twenty = spin_lengths(20);
  ASSERT_EQ(twenty.size(), 11U);
  EXPECT_EQ(twenty.front(), 20);
  EXPECT_EQ(twenty.back(), 0);
  for (std::size_t i = 1; i < twenty.size(); ++i) EXPECT_LT(twenty[i], twenty[i - 1]);
}

TEST(SpinLengths, RejectsZero) { EXPECT_THROW(spin_lengths(0), InvalidArgument); }

TEST(BuildLayout, Dimensions) {
  EXPECT_EQ(build_layout(1)->spin_dim(), 4U);
  EXPECT_EQ(build_layout(1)->total_dim(), 16U);
  EXPECT_EQ(build_layout(2)->spin_dim(), 10U);
  EXPECT_EQ(build_layout(2)->total_dim(), 90U);

  std::size_t expected = 0;
  for (int j = 0; j <= 10; ++j) expected += static_cast<std::size_t>((2 * j + 1) * (2 * j + 1));
  EXPECT_EQ(build_layout(20)->spin_dim(), expected);
  EXPECT_EQ(expected, 1771U);
}

TEST(BuildLayout, MatchesBruteForceEnumeration) {
  for (int n = 1; n <= 12; ++n) {
    const auto layout = build_layout(n);
    const auto expected = brute_force_triples(n);
    ASSERT_EQ(layout->spin_dim(), expected.size()) << "N=" << n;
    // (N+1)(N+2)(N+3)/6 holds for odd N too: sum of even squares up to (N+1)^2
    EXPECT_EQ(layout->spin_dim(), static_cast<std::size_t>((n + 1) * (n + 2) * (n + 3) / 6));
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t i = 0; i < layout->spin_dim(); ++i) {
      const SpinTriple& t = layout->triple(i);
      seen.emplace(t.two_j, t.two_n, t.two_m);
      EXPECT_EQ(layout->spin_index(t), i);
    }
    EXPECT_EQ(seen, expected);
  }
}

TEST(BuildLayout, OrderingIsDescending) {
  const auto layout = build_layout(5);
  for (std::size_t i = 1; i < layout->spin_dim(); ++i) {
    const SpinTriple& a = layout->triple(i - 1);
    const SpinTriple& b = layout->triple(i);
    EXPECT_TRUE(std::tie(a.two_j, a.two_n, a.two_m) > std::tie(b.two_j, b.two_n, b.two_m));
  }
  // fully symmetric sector first
  EXPECT_EQ(layout->triple(0).two_j, 5);
  EXPECT_EQ(layout->triple(35).two_j, 5);
  EXPECT_EQ(layout->triple(36).two_j, 3);
}

TEST(BuildLayout, FlatRoundTrip) {
  for (int n = 1; n <= 6; ++n) {
    const auto layout = build_layout(n);
    for (std::size_t f = 0; f < layout->total_dim(); ++f) {
      const Component c = layout->component(f);
      EXPECT_EQ(layout->flat_index(c), f);
    }
  }
}

TEST(BuildLayout, RejectsInvalidTriples) {
  const auto layout = build_layout(2);
  EXPECT_FALSE(layout->is_valid({2, 4, 0}));
  EXPECT_FALSE(layout->is_valid({0, 2, 0}));
  EXPECT_FALSE(layout->is_valid({1, 1, 1}));
  EXPECT_FALSE(layout->find_spin_index({2, 3, 1}).has_value());
  EXPECT_THROW(layout->spin_index({4, 0, 0}), InvalidArgument);
}

TEST(SectorWeights, TwoQubits) {
  const auto w = sector_weights(2);
  EXPECT_EQ(w.alpha(2), 1U);
  EXPECT_EQ(w.degeneracy(2), 1U);
  EXPECT_EQ(w.alpha(0), 2U);
  EXPECT_EQ(w.degeneracy(0), 1U);
}

TEST(SectorWeights, FourQubitsTriplet) {
  const auto w = sector_weights(4);
  EXPECT_EQ(w.alpha(2), 4U);
  EXPECT_EQ(w.degeneracy(2), 3U);
}

TEST(SectorWeights, OutsideRangeIsZero) {
  const auto w = sector_weights(4);
  EXPECT_EQ(w.alpha(6), 0U);
  EXPECT_EQ(w.degeneracy(6), 0U);
  EXPECT_EQ(w.degeneracy(1), 0U);
}

TEST(SectorWeights, DimensionIdentity) {
  for (int n = 1; n <= 30; ++n) {
    const auto w = sector_weights(n);
    std::uint64_t total = 0;
    for (int two_j : spin_lengths(n)) total += w.degeneracy(two_j) * static_cast<std::uint64_t>(two_j + 1);
    EXPECT_EQ(total, std::uint64_t{1} << n) << "N=" << n;
  }
}

TEST(SectorWeights, MatchesHookLengthCount) {
  // d_N^J = C(N, k) - C(N, k-1) with k = N/2 - J
  for (int n = 1; n <= 20; ++n) {
    const auto w = sector_weights(n);
    for (int two_j : spin_lengths(n)) {
      const int k = (n - two_j) / 2;
      const std::uint64_t expected = binomial(n, k) - (k > 0 ? binomial(n, k - 1) : 0);
      EXPECT_EQ(w.degeneracy(two_j), expected) << "N=" << n << " 2J=" << two_j;
    }
  }
}
