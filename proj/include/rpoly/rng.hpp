#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace rpoly {

// Philox4x32-10 keyed by the master seed. The 128-bit counter holds the
// stream id, a lane tag and the block index, so stream (seed, id, lane) is
// derivable in O(1) without touching any other stream.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint32_t lane = 0) noexcept
        : seed_(master_seed), stream_(stream_id), lane_(lane) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (pos_ == 2) refill();
        return buffer_[pos_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1).
    double uniform_open() noexcept { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }
    double normal() { return normal_(*this); }

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_; }
    [[nodiscard]] std::uint32_t lane() const noexcept { return lane_; }

    // Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint32_t lane_;
    std::uint64_t block_ = 0;
    std::array<result_type, 2> buffer_{};
    unsigned pos_ = 2;
    std::normal_distribution<double> normal_;
};

// Lane tags separating independent uses of one trial's stream id.
namespace lanes {
inline constexpr std::uint32_t points = 0;
inline constexpr std::uint32_t poisson_count = 1;
inline constexpr std::uint32_t probes = 2;
inline constexpr std::uint32_t auxiliary = 3;
inline constexpr std::uint32_t independent = 4;
}  // namespace lanes

}  // namespace rpoly
