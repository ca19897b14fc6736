#pragma once

// Counter-based splittable random generator. Every draw is a pure function
// of (seed, stream id, counter), so batches can be generated in parallel in
// any order with bitwise-reproducible results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cvqkd {

namespace detail {

// SplitMix64 finalizer; full-avalanche 64 -> 64 mix
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    std::uint64_t h = mix64(seed ^ 0x2545f4914f6cdd1dull);
    h = mix64(h ^ stream);
    h = mix64(h ^ ctr);
    return h;
}

}  // namespace detail

/// Uniform double in [0, 1) for the given (seed, stream, counter) triple.
inline double rng_u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    return static_cast<double>(detail::hash3(seed, stream, ctr) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::uint64_t rng_below(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t ctr, std::uint64_t n) {
    return detail::hash3(seed, stream, ctr) % n;
}

/// Standard normal via Box-Muller; draw j of the (seed, stream, ctr) cell.
/// Two uniforms are consumed per pair, keyed on the same counter.
inline double rng_gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    const std::uint64_t base = ctr >> 1;
    double u1 = rng_u01(seed, stream, 2 * base);
    const double u2 = rng_u01(seed, stream, 2 * base + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return (ctr & 1) ? r * std::sin(th) : r * std::cos(th);
}

/// Sequential view over one stream.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double u01() { return rng_u01(seed_, stream_, ctr_++); }
    double gauss() { return rng_gauss(seed_, stream_, ctr_++); }
    std::uint64_t below(std::uint64_t n) { return rng_below(seed_, stream_, ctr_++, n); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
};

}  // namespace cvqkd
