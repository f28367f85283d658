#pragma once

// Deterministic counter-keyed random streams (splitmix64 seeding + xoshiro256++).
//
// <random> engines are avoided on purpose: their distributions are not required
// to produce identical sequences across standard libraries, and every sampled
// record here must be byte-reproducible from (master seed, job index) alone.

#include <array>
#include <cmath>
#include <cstdint>

namespace xeb {

// SplitMix64 step (Vigna); doubles as a strong 64-bit mixing function.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Collapse (master seed, stream index) into a single well-mixed 64-bit key.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ull);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    // Independent stream for job `index` under `master`; scheduling-order free.
    static Rng stream(std::uint64_t master, std::uint64_t index) {
        return Rng(mix_seed(master, index));
    }

    // The seed this stream was constructed from (provenance records).
    std::uint64_t seed() const { return seed_; }

    // xoshiro256++ core step.
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1]; safe as a log() argument.
    double uniform01_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, bound) by masked rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t mask = mask_for(bound - 1);
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= bound);
        return v;
    }

    // Standard normal via Box-Muller; second variate of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double c = std::cos(6.283185307179586476925286766559 * u2);
        const double s = std::sin(6.283185307179586476925286766559 * u2);
        cached_ = r * s;
        have_cached_ = true;
        return r * c;
    }

    // Exp(1) variate.
    double exponential() { return -std::log(uniform01_open()); }

    // Fisher-Yates shuffle of [first, first+count).
    template <typename T>
    void shuffle(T* first, std::size_t count) {
        for (std::size_t i = count; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            T tmp = first[i - 1];
            first[i - 1] = first[j];
            first[j] = tmp;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t mask_for(std::uint64_t v) {
        std::uint64_t m = v;
        m |= m >> 1;
        m |= m >> 2;
        m |= m >> 4;
        m |= m >> 8;
        m |= m >> 16;
        m |= m >> 32;
        return m;
    }

    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace xeb
