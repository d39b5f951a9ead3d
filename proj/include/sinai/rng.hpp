#ifndef SINAI_RNG_HPP
#define SINAI_RNG_HPP

#include <cmath>
#include <cstdint>

// Counter-based randomness built on the SplitMix64 mixer.  Every variate is a
// pure function of (stream seed, counter), so site x of an environment draws
// the same value no matter how wide the window is, replicate streams can be
// derived without coordination, and parallel runs are bit-identical to serial
// ones.

namespace sinai::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// k-th output of the SplitMix64 stream with base `seed`; O(1) random access.
inline constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t k) {
    return mix64(seed + (k + 1) * kGolden);
}

// Derive an independent child stream from (seed, tag).
inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + kGolden));
}

inline constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return derive(derive(seed, tag_a), tag_b);
}

// Map signed site indices to distinct counters.
inline constexpr std::uint64_t zigzag(long x) {
    auto u = static_cast<std::uint64_t>(x);
    return (u << 1) ^ static_cast<std::uint64_t>(x >> (sizeof(long) * 8 - 1));
}

// 53-bit uniform in [0, 1).
inline constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double site_uniform(std::uint64_t seed, long x) {
    return to_unit(at(seed, zigzag(x)));
}

// Sequential engine over the same stream layout, for chains that are
// intrinsically ordered (ladder estimation, Box-Muller pairs, ...).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }
    double next_unit() { return to_unit(next()); }

    // Standard normal via Box-Muller; consumes two draws.
    double next_normal() {
        double u1 = 1.0 - next_unit();  // (0, 1]
        double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace sinai::rng

#endif
