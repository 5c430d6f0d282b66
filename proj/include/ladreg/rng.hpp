#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ladreg::rng {

// SplitMix64 finalizer.  Serves two purposes: deriving independent
// substream seeds from a master seed, and acting as a stateless
// counter-based generator for randomly-accessed draws (fresh innovation
// copies indexed by position need random access, not a sequential stream).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a) noexcept {
    return mix64(seed ^ mix64(a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return derive(derive(seed, a), b);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) noexcept {
    return derive(derive(seed, a, b), c);
}

// Uniform in (0,1); never returns 0 or 1.
inline double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t key, std::uint64_t counter) noexcept {
    return to_unit(mix64(key ^ (counter * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)));
}

// Standard normal draw addressed by (key, counter): Box-Muller on two
// counter slots.  Rejection-free so the counter mapping stays stable.
inline double normal_at(std::uint64_t key, std::uint64_t counter) noexcept {
    const double u1 = uniform_at(key, 2 * counter);
    const double u2 = uniform_at(key, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Sequential substream.  Normal draws use the same Box-Muller transform as
// normal_at so path output depends only on the seed, not on the standard
// library's normal_distribution implementation.
class Engine {
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return to_unit(gen_()); }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace ladreg::rng
