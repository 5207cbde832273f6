#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "critloop/errors.hpp"

namespace critloop {

// Pinned deterministic generator (splitmix64). Sampling results are part of
// reproducibility contracts (batch files, evaluation reports), so we do not
// rely on std distributions, whose outputs differ between standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ContractViolation("SplitMix64::below: n must be positive");
    const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t v = next();
      if (v >= threshold) return v % n;
    }
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream for (seed, stream_index) so that trials or
// records can be processed in any schedule without changing results.
inline SplitMix64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
  // Burn one output so neighbouring streams decorrelate.
  mixer.next();
  return mixer;
}

// n distinct indices from [0, pool_size), ascending. Partial Fisher-Yates.
inline std::vector<std::size_t> sample_without_replacement(SplitMix64& rng,
                                                           std::size_t pool_size,
                                                           std::size_t n) {
  if (n > pool_size)
    throw ContractViolation("sample_without_replacement: n exceeds pool size");
  std::vector<std::size_t> indices(pool_size);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool_size - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());
  return indices;
}

template <typename T>
void shuffle(SplitMix64& rng, std::vector<T>& values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace critloop
