// rng.hpp — Counter-based random streams (Philox4x32-10)
//
// A stream is addressed by (master seed, stream index); the n-th draw of a
// stream is a pure function of (seed, stream, n). Trajectory i always sees the
// same numbers regardless of thread count or execution order.

#pragma once

#include <array>
#include <cstdint>

namespace semigroup {

struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    // Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    std::uint64_t next_u64();

    std::uint64_t draws() const noexcept { return block_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

} // namespace semigroup
