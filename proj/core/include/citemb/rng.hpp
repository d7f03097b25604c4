#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace citemb {

// Deterministic random source. mt19937_64 output is fully specified by the
// standard, and the derived draws below avoid std::uniform_*_distribution,
// whose exact sequences are implementation-defined. Seeded runs therefore
// reproduce bit-for-bit across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Modulo bias is negligible for the bounds used here.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(eng_() % n);
    }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller (used by tests and fixtures).
    double next_gaussian() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 eng_;
};

// Derives independent stream seeds from one user seed (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace citemb
