#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "damctl/random.hpp"

using namespace damctl;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, ReproducibleAndDistinctStreams) {
  CounterStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_EQ(a.blocks_used(), 500u);  // two 64-bit draws per block
}

TEST(CounterStream, UniformMoments) {
  CounterStream s(1, 0);
  const int n = 200000;
  double m = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    m += u;
    m2 += u * u;
  }
  m /= n;
  m2 /= n;
  // standard errors ~ 6.5e-4 and 6.7e-4
  EXPECT_NEAR(m, 0.5, 4e-3);
  EXPECT_NEAR(m2, 1.0 / 3.0, 4e-3);
}

TEST(CounterStream, ExponentialAndGammaMoments) {
  CounterStream s(9, 3);
  const int n = 200000;
  double e = 0;
  for (int i = 0; i < n; ++i) e += s.exponential(2.0);
  EXPECT_NEAR(e / n, 0.5, 5e-3);

  for (double shape : {0.4, 1.0, 3.5}) {
    double m = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
      const double g = s.standard_gamma(shape);
      ASSERT_GT(g, 0.0);
      m += g;
      m2 += g * g;
    }
    m /= n;
    const double var = m2 / n - m * m;
    EXPECT_NEAR(m, shape, 6 * std::sqrt(shape / n)) << "shape " << shape;
    EXPECT_NEAR(var, shape, 0.05 * shape + 6 * std::sqrt(shape * (6 + 2 * shape) / n)) << "shape " << shape;
  }
}
