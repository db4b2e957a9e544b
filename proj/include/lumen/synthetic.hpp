#pragma once

#include <cstdint>

#include "lumen/image.hpp"

namespace lumen {

/// Tiny deterministic PRNG (splitmix64). Used instead of <random> engines
/// so fixture generation is reproducible across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound).
    std::uint32_t below(std::uint32_t bound) { return static_cast<std::uint32_t>(next() % bound); }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Deterministic textured test frame: a smooth gradient background with
/// random rectangles and speckle, giving the detector realistic corner
/// density. Same (w, h, seed) always produces the same image.
GrayImage synthetic_textured_frame(int width, int height, std::uint64_t seed);

}  // namespace lumen
