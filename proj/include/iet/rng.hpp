#pragma once
#include "iet/rational.hpp"

#include <cstdint>

namespace iet {

/* splitmix64: tiny, fast, and good enough for sampling generator words;
   every trajectory gets its own stream derived from (seed, index) so
   results are independent of thread scheduling */
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // uniform in [0, 1)
    double real() { return static_cast<double>(next() >> 11) * 0x1p-53; }
};

inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL)));
}

} // namespace iet
