#pragma once

// Counter-based random draws. Every value is a pure function of
// (seed, index, kind), so generated content never depends on call order,
// thread scheduling or the standard library's distribution implementations.

#include <cstdint>
#include <string_view>
#include <vector>

namespace diarkit {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a.
std::uint64_t stable_hash(std::string_view text) noexcept;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t kind = 0) noexcept;

// Uniform in [0, 1) with 53 bits of resolution.
double unit_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t kind) noexcept;

// Uniform in [0, n); n must be positive.
std::uint64_t bounded_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t kind,
                           std::uint64_t n) noexcept;

// Fisher-Yates permutation of [0, n) keyed by (seed, stream).
std::vector<std::size_t> keyed_permutation(std::size_t n, std::uint64_t seed,
                                           std::uint64_t stream);

}  // namespace diarkit
