#include <npg/rng.hpp>

#include <gtest/gtest.h>

#include <set>

namespace npg {
namespace {

// Known-answer vectors of the Random123 Philox4x32-10 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RngStream, SameKeySameSequence) {
  RngStream a(42, 7);
  RngStream b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctStreamsDiffer) {
  RngStream a(42, 7);
  RngStream b(42, 8);
  RngStream c(43, 7);
  int same_b = 0;
  int same_c = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same_b += x == b.next_u64();
    same_c += x == c.next_u64();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(RngStream, FirstDrawMatchesBlockFunction) {
  RngStream stream(5, RngStream::stream_key(2, 3));
  const std::uint64_t id = RngStream::stream_key(2, 3);
  const auto block = philox4x32({0, 0, static_cast<std::uint32_t>(id),
                                 static_cast<std::uint32_t>(id >> 32)},
                                {5, 0});
  const std::uint64_t expected = (std::uint64_t{block[1]} << 32) | block[0];
  EXPECT_EQ(stream.next_u64(), expected);
}

TEST(RngStream, StreamKeyLayout) {
  EXPECT_EQ(RngStream::stream_key(0, 5), 5u);
  EXPECT_EQ(RngStream::stream_key(1, 0), std::uint64_t{1} << 40);
  std::set<std::uint64_t> keys;
  for (std::uint64_t k = 0; k < 20; ++k) {
    for (std::uint64_t t = 0; t < 20; ++t) keys.insert(RngStream::stream_key(k, t));
  }
  EXPECT_EQ(keys.size(), 400u);
}

TEST(RngStream, UniformInUnitInterval) {
  RngStream stream(1, 1);
  double total = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = stream.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    total += u;
  }
  // Mean of n uniforms has standard deviation sqrt(1/12/n) ~ 6.5e-4.
  EXPECT_NEAR(total / n, 0.5, 4e-3);
}

TEST(RngStream, BernoulliFrequency) {
  RngStream stream(9, 0);
  int hits = 0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) hits += stream.bernoulli(0.9);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.9, 5e-3);
}

}  // namespace
}  // namespace npg
