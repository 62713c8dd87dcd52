#pragma once

#include <array>
#include <cstdint>

namespace regchrom {

/// Counter-based Philox4x32-10 generator. A generator is addressed by
/// (seed, stream); every stream is an independent sequence, so sample i of
/// an experiment can be reproduced without replaying samples 0..i-1.
class Philox {
public:
    using result_type = std::uint32_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xFFFFFFFFu; }

    result_type operator()() noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
    /// Platform independent, unlike std::uniform_int_distribution.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int index_ = 4;
};

}  // namespace regchrom
