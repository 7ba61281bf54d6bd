#pragma once

#include <cstdint>
#include <random>

namespace reds {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a tag.
/// Every random stream is keyed by (seed, index), never by execution order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix64(mix64(parent) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// Stream tags for the sub-streams of one ensemble member.
namespace stream {
inline constexpr std::uint64_t member = 1;
inline constexpr std::uint64_t weights = 2;
inline constexpr std::uint64_t minibatch = 3;
}  // namespace stream

}  // namespace reds
