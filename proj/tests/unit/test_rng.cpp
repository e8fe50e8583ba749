#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "kpca/error.hpp"
#include "kpca/rng.hpp"

namespace kpca {
namespace {

// Reference values from an independent SplitMix64 transcription.
TEST(SeededRng, MatchesReferenceSequence) {
  SeededRng rng(42);
  EXPECT_EQ(rng.next_u64(), 0x8ca10b1dbe91ee23ULL);
  EXPECT_EQ(rng.next_u64(), 0xe72aac3121269f60ULL);
  EXPECT_EQ(rng.next_u64(), 0xeb61ef540335612cULL);
  SeededRng u(42);
  EXPECT_DOUBLE_EQ(u.uniform(), 0.549332327615566);
  SeededRng g(42);
  EXPECT_NEAR(g.normal(), 0.8974822834730815, 1e-15);
}

TEST(SeededRng, SameSeedSameSequence) {
  SeededRng a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(SeededRng, CounterResumesSequence) {
  SeededRng a(5);
  for (int i = 0; i < 10; ++i) a.next_u64();
  SeededRng b(5, a.counter());
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeededRng, UniformRanges) {
  SeededRng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double o = rng.uniform_open();
    EXPECT_GT(o, 0.0);
    EXPECT_LT(o, 1.0);
    const double a = rng.uniform_angle();
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, 2.0 * M_PI);
  }
}

TEST(SeededRng, NormalMoments) {
  SeededRng rng(2);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(SeededRng, CauchyQuartilesAtPlusMinusScale) {
  SeededRng rng(3);
  std::vector<double> x(100001);
  for (double& v : x) v = rng.cauchy(2.5);
  std::sort(x.begin(), x.end());
  EXPECT_NEAR(x[x.size() / 2], 0.0, 0.05);
  EXPECT_NEAR(x[x.size() / 4], -2.5, 0.1);
  EXPECT_NEAR(x[3 * x.size() / 4], 2.5, 0.1);
}

TEST(SeededRng, UniformIndexCoversRangeEvenly) {
  SeededRng rng(4);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_THROW(rng.uniform_index(0), Error);
}

TEST(SeededRng, SampleWithoutReplacement) {
  SeededRng rng(5);
  const auto s = rng.sample_without_replacement(50, 20);
  EXPECT_EQ(s.size(), 20u);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 20u);
  for (auto i : s) EXPECT_LT(i, 50u);
  auto all = rng.sample_without_replacement(9, 9);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(all[i], i);
  EXPECT_THROW(rng.sample_without_replacement(3, 4), Error);
  SeededRng a(6), b(6);
  EXPECT_EQ(a.sample_without_replacement(100, 10), b.sample_without_replacement(100, 10));
}

TEST(SeededRng, ForkIsStableAndDoesNotAdvanceParent) {
  SeededRng parent(9);
  const auto before = parent.counter();
  SeededRng f1 = parent.fork(1);
  SeededRng f1b = parent.fork(1);
  SeededRng f2 = parent.fork(2);
  EXPECT_EQ(parent.counter(), before);
  const auto x = f1.next_u64();
  EXPECT_EQ(x, f1b.next_u64());
  EXPECT_NE(x, f2.next_u64());
}

}  // namespace
}  // namespace kpca
