// Reproducible random streams. A root seed fans out into independent
// substreams via splitmix64 hashing, and every variate transform is done
// here rather than through std:: distributions, whose output is not pinned
// by the standard. Identical seeds therefore give identical event sequences
// on any platform.
#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>

namespace icmn {

inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t state = a ^ (0x9e3779b97f4a7c15ULL + (b << 1));
    std::uint64_t h = splitmix64_next(state);
    state ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return splitmix64_next(state);
}

// Derives the seed of a named substream: derive_seed(root, kind, id, ...).
// Distinct id tuples give unrelated streams.
template <class... Ids>
std::uint64_t derive_seed(std::uint64_t root, Ids... ids) noexcept {
    std::uint64_t h = seed_mix(root, 0x1c3665a7d2f05b19ULL);
    ((h = seed_mix(h, static_cast<std::uint64_t>(ids))), ...);
    return h;
}

// One seeded stream of variates. mt19937_64 supplies the bits (its output
// sequence is fully specified by the standard); the transforms below map
// them to doubles deterministically.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given rate; mean 1/rate.
    double exponential(double rate) {
        if (!(rate > 0.0))
            throw std::invalid_argument("exponential rate must be > 0");
        return -std::log1p(-uniform01()) / rate;
    }

    bool coin() { return (bits() & 1u) != 0; }

    // Uniform integer in [0, n), rejection-sampled so every value is
    // exactly equally likely.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0)
            throw std::invalid_argument("below(0) is empty");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = bits();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace icmn
