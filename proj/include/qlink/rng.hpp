#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qlink {

// splitmix64; used to decorrelate seeds derived from a single global seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-run seed derivation: global seed mixed with a run label, so each
// subcommand/run draws from an independent stream.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view label) {
    return splitmix64(global_seed ^ fnv1a64(label));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

} // namespace qlink
