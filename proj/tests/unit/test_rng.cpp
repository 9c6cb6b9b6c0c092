#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "switchjump/rng.hpp"
#include "switchjump/stats.hpp"

using namespace switchjump;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, ReproducibleAndDistinct) {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 100; ++k) {
    const auto va = a();
    EXPECT_EQ(va, b());
    seen.insert(va);
    seen.insert(c());
    seen.insert(d());
  }
  EXPECT_EQ(seen.size(), 300u);
}

TEST(RandomStream, StreamIdsAreInjective) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t p = 0; p < 100; ++p) {
    for (auto s : {Substream::brownian, Substream::large_jump, Substream::small_jump, Substream::switching,
                   Substream::auxiliary}) {
      ids.insert(stream_id(p, s));
    }
  }
  EXPECT_EQ(ids.size(), 500u);
}

TEST(RandomStream, UniformIsUniform) {
  RandomStream rng(1, 0);
  std::vector<double> u(20000);
  for (auto& v : u) {
    v = rng.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  const auto ks = stats::ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_GT(ks.p_value, 0.001);
}

TEST(RandomStream, NormalAndExponentialMoments) {
  RandomStream rng(3, 1);
  std::vector<double> z(50000), e(50000);
  for (auto& v : z) v = rng.normal();
  for (auto& v : e) v = rng.exponential(2.0);
  const auto sz = stats::summarize(z), se = stats::summarize(e);
  EXPECT_NEAR(sz.mean, 0.0, 4 * sz.std_error());
  EXPECT_NEAR(sz.variance, 1.0, 0.03);
  EXPECT_NEAR(se.mean, 0.5, 4 * se.std_error());
}

TEST(RandomStream, ExponentialRejectsBadRate) {
  RandomStream rng(1, 1);
  EXPECT_ANY_THROW(rng.exponential(0.0));
}

TEST(Mix64, SpreadsNeighbouringSeeds) {
  EXPECT_NE(mix64(1), mix64(2));
  EXPECT_NE(mix64(0), 0u);
}
