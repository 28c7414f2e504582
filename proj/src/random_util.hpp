#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fao::detail {

// Bounded draw and shuffle with an explicit algorithm so streams stay stable
// across standard-library implementations.
inline uint32_t bounded_rand(std::mt19937_64& rng, uint32_t n) {
  const uint64_t threshold = (~uint64_t{0}) - (~uint64_t{0}) % n;
  uint64_t v = rng();
  while (v >= threshold) v = rng();
  return (uint32_t)(v % n);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = bounded_rand(rng, (uint32_t)i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace fao::detail
