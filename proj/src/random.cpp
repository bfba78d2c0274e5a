#include "diarkit/random.hpp"

#include <cstdint>
#include <numeric>
#include <utility>

namespace diarkit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t kind) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ (kind * 0xd1b54a32d192ed03ULL));
}

double unit_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t kind) noexcept {
  return static_cast<double>(derive_seed(seed, index, kind) >> 11) * 0x1.0p-53;
}

std::uint64_t bounded_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t kind,
                           std::uint64_t n) noexcept {
  // Rejection sampling; retries use fresh counter values.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  const std::uint64_t key = derive_seed(seed, index, kind);
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t x = attempt == 0 ? key : splitmix64(key ^ attempt);
    if (x < limit) return x % n;
  }
}

std::vector<std::size_t> keyed_permutation(std::size_t n, std::uint64_t seed,
                                           std::uint64_t stream) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const std::uint64_t key = derive_seed(seed, stream, 0x5eed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(key, i, 0, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace diarkit
