#ifndef NSBIDICO_RANDOM_HPP
#define NSBIDICO_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace nsbidico {

/// Seeded random stream owned by a single run.
///
/// Draws are defined in terms of the raw 64-bit Mersenne Twister output so
/// the sequence does not depend on the standard library's distribution
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        // Rejection keeps the draw unbiased for every n.
        const std::uint64_t range = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return static_cast<std::size_t>(r % range);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace nsbidico

#endif
