#pragma once
// Deterministic 64-bit generator used wherever reproducibility is part of
// the contract (bench corpus, bootstrap resampling). SplitMix64, constants
// from the reference description:
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Index draws use the widening-multiply map floor(next * n / 2^64); unit
// reals use the top 53 bits scaled by 2^-53.

#include <cstdint>

namespace stratum {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, n). n must be > 0.
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform draw in [0, 1) with 53-bit resolution.
    double next_real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

} // namespace stratum
