#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace implreg {

using Engine = std::mt19937_64;

// Stream tags used when splitting a seed.
enum class Stream : std::uint64_t {
    design = 0x11,
    noise = 0x22,
    sgd = 0x33,
    trial = 0x44,
    cell = 0x55,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based derivation: the result depends only on the seed and the path,
// so adding cells or trials never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t seed, Stream s, std::uint64_t index = 0) {
    return derive_seed(seed, {static_cast<std::uint64_t>(s), index});
}

Engine make_engine(std::uint64_t seed);

}  // namespace implreg
