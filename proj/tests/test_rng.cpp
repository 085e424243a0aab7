#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gpmax/rng.hpp"

using namespace gpmax;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero)
{
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    const Philox4x32::Block want{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
    EXPECT_EQ(out, want);
}

TEST(Philox, KnownAnswerOnes)
{
    const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
    const Philox4x32::Block want{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
    EXPECT_EQ(out, want);
}

TEST(Philox, KnownAnswerPi)
{
    const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
    const Philox4x32::Block want{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
    EXPECT_EQ(out, want);
}

TEST(StreamEngine, DeterministicPerStream)
{
    StreamEngine a({7, 3, 2});
    StreamEngine b({7, 3, 2});
    for (int i = 0; i < 1000; ++i)
    {
        ASSERT_EQ(a(), b());
    }
}

TEST(StreamEngine, DistinctStreamsDiffer)
{
    std::set<std::uint64_t> first;
    for (std::uint64_t seed : {0u, 1u})
    {
        for (std::uint64_t rep : {0u, 1u, 1u << 20})
        {
            for (std::uint32_t comp : {0u, 1u, 2u})
            {
                StreamEngine e({seed, rep, comp});
                first.insert(e());
            }
        }
    }
    EXPECT_EQ(first.size(), 18u);
}

TEST(StreamEngine, ReplicaHighBitsMatter)
{
    StreamEngine a({5, 1, 0});
    StreamEngine b({5, (1ull << 32) | 1ull, 0});
    EXPECT_NE(a(), b());
}

TEST(NormalStream, MomentsAndUniformRange)
{
    NormalStream z({11, 0, 0});
    const int n = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i)
    {
        const double x = z();
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / n));

    double umin = 1, umax = 0, usum = 0;
    for (int i = 0; i < n; ++i)
    {
        const double u = z.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        usum += u;
    }
    EXPECT_GT(umin, 0.0);
    EXPECT_LT(umax, 1.0);
    EXPECT_NEAR(usum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}
