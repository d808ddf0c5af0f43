#pragma once

#include <cstdint>

namespace eqkd {

/// SplitMix64 (Steele, Lea & Flood 2014). State advances by the golden-ratio
/// increment 0x9E3779B97F4A7C15 and each output is the standard two-multiply
/// finalizer, so a seed yields the same stream on every platform.
///
/// `split()` draws one output and uses it, re-mixed, as the seed of a child
/// stream. Children are independent of the parent's later output for all
/// practical purposes.
class Prng {
public:
    explicit Prng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        ++position_;
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    /// Unbiased integer in [0, n); n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    Prng split() {
        std::uint64_t z = next_u64() ^ 0xD1B54A32D192ED03ULL;
        z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDULL;
        return Prng(z ^ (z >> 33));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return position_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    std::uint64_t position_ = 0;
};

}  // namespace eqkd
