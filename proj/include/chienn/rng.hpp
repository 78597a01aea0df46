#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chienn {

// All randomness in the toolkit flows from one master seed through named
// substreams, so independent stages (data, init, shuffle) stay reproducible
// regardless of how often the others draw.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    // FNV-1a over the name, mixed with the master seed via splitmix64.
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view name) {
    return std::mt19937_64(substream_seed(master, name));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

inline double normal(std::mt19937_64& rng, double mean = 0.0, double stddev = 1.0) {
    std::normal_distribution<double> d(mean, stddev);
    return d(rng);
}

}  // namespace chienn
