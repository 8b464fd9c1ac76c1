#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace citeimpact {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a, 64-bit. Stable across platforms and processes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Seeded generator whose output sequence is fixed by the standard (mt19937_64)
// and whose derived draws avoid implementation-defined distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace citeimpact
