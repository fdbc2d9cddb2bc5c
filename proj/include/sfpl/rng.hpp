#pragma once

#include <cstdint>
#include <random>

namespace sfpl {

/// Independent generator for stream `stream` of a seeded experiment. The
/// seed_seq expansion is fully specified by the standard, so streams are
/// reproducible across platforms.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5f504c53u};
    return std::mt19937_64(seq);
}

/// Well-mixed 64-bit value derived from (seed, stream) for seeding sub-tasks.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sfpl
