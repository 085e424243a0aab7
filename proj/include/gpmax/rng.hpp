#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace gpmax {

//! Identifies one independent random substream: (master seed, replica, component).
//! Component 0 is reserved for the common process of a replica; component i+1
//! drives the i-th independent process.
struct StreamId
{
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    std::uint32_t component = 0;

    StreamId with_component(std::uint32_t c) const { return {seed, replica, c}; }
};

//! Philox4x32-10 block function. Key is the master seed, counter is
//! (block, component, replica lo, replica hi).
struct Philox4x32
{
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block block(Block ctr, Key key)
    {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round)
        {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    static Block block(const StreamId& id, std::uint32_t index)
    {
        return block({index, id.component, static_cast<std::uint32_t>(id.replica),
                      static_cast<std::uint32_t>(id.replica >> 32)},
                     {static_cast<std::uint32_t>(id.seed), static_cast<std::uint32_t>(id.seed >> 32)});
    }
};

//! xoshiro256** whose 256-bit state is the first two Philox blocks of a stream.
class StreamEngine
{
  public:
    using result_type = std::uint64_t;

    explicit StreamEngine(const StreamId& id)
    {
        const auto b0 = Philox4x32::block(id, 0);
        const auto b1 = Philox4x32::block(id, 1);
        s_[0] = join(b0[0], b0[1]);
        s_[1] = join(b0[2], b0[3]);
        s_[2] = join(b1[0], b1[1]);
        s_[3] = join(b1[2], b1[3]);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0)
        {
            s_[0] = 1;
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static std::uint64_t join(std::uint32_t lo, std::uint32_t hi)
    {
        return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

//! Standard normal and uniform draws from one stream.
class NormalStream
{
  public:
    explicit NormalStream(const StreamId& id) : eng_(id) {}

    double operator()() { return dist_(eng_); }

    //! Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  private:
    StreamEngine eng_;
    boost::random::normal_distribution<double> dist_;
};

}  // namespace gpmax
