// rng.cpp — Philox4x32-10

#include "semigroup/rng.hpp"

namespace semigroup {

namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9;
constexpr std::uint32_t kW32B = 0xBB67AE85;
constexpr std::uint32_t kM4x32A = 0xD2511F53;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k)
{
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key)
{
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kW32A;
            key[1] += kW32B;
        }
        ctr = round(ctr, key);
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream)
{
}

std::uint64_t RandomStream::next_u64()
{
    if (used_ >= 4) {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = Philox4x32::generate(ctr, key_);
        ++block_;
        used_ = 0;
    }
    const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_)];
    const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_ + 1)];
    used_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::uniform()
{
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace semigroup
