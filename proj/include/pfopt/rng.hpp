#pragma once

#include <cstdint>
#include <random>

namespace pfopt {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent engine for draw `stream` of a seeded source.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

}  // namespace pfopt
