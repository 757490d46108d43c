// Seedable counter-style generator. Identical seeds reproduce identical
// streams bit-for-bit across runs on the same build; independent streams
// are derived by hashing (seed, index).

#pragma once

#include <cstdint>
#include <utility>

namespace ootune {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on the open interval (0, 1), 53 significant bits.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller pair of independent standard normals.
    std::pair<double, double> normal_pair();

    // Exponential draw with the given rate; strictly positive.
    double exponential(double rate);

private:
    std::uint64_t state_;
};

// Independent substream seed for repetition `index` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace ootune
