#pragma once

#include <cstdint>
#include <random>

namespace dynlab {

using Rng = std::mt19937_64;

/// Stream identifiers; every random consumer draws from its own stream so that
/// estimators sharing a seed never reuse variates.
enum class Stream : std::uint64_t {
    gaussian = 1,
    paths = 2,
    identities = 3,
    models = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for replica block `block` of `stream` under the top-level seed.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t block = 0)
{
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ static_cast<std::uint64_t>(stream));
    key = splitmix64(key ^ (block * 0xd1b54a32d192ed03ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

}  // namespace dynlab
