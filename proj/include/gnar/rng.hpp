#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gnar {

/**
 * @brief Portable seeded random stream.
 *
 * splitmix64 words; uniforms are (word >> 11) * 2^-53 in [0, 1); normals
 * use Box-Muller on two uniforms (u1, u2):
 *
 *     z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2),  z1 = ... sin(2 pi u2)
 *
 * z0 is returned first and z1 cached for the next call. The sequence is
 * fully determined by the seed.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Seed of the k-th child stream: the k-th splitmix64 output of a stream seeded with @p master.
    static std::uint64_t child_seed(std::uint64_t master, std::uint64_t k) {
        RngStream s(master + k * 0x9e3779b97f4a7c15ULL);
        return s.next_u64();
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace gnar
