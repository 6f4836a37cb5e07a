#pragma once

#include <array>
#include <cstdint>

namespace hybran {

/// xoshiro256** seeded through splitmix64.
///
/// Hand-rolled instead of <random> because std::uniform_real_distribution is
/// not bit-reproducible across standard library implementations, and every
/// artifact this tool emits must be regenerable from a seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 stream expands the seed into the 256-bit state.
        std::uint64_t z = seed;
        for (auto& word : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            word = x ^ (x >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform draw in [a, b).
    double uniform(double a, double b) { return a + (b - a) * next_unit(); }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace hybran
