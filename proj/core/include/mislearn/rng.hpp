#pragma once

#include <cstdint>
#include <random>

namespace mislearn {

// splitmix64; used to derive independent seeds for parallel replication streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// RNG for stream `stream` derived from a base seed. Every stochastic operation
// takes its seed from config so runs are reproducible bit-for-bit on a build.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 0x51ed2701a2b5f7d3ULL)));
}

}  // namespace mislearn
