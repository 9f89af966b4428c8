#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cskit {

// Seeded RNG helpers. Distribution shaping is done by hand (not via
// std::*_distribution) so the produced streams are identical on every
// platform for a given seed.

inline double next_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). n must be > 0.
inline std::size_t next_index(std::mt19937_64& gen, std::size_t n) {
  return static_cast<std::size_t>(next_unit(gen) * static_cast<double>(n)) % n;
}

template <class T>
void shuffle(std::vector<T>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[next_index(gen, i)]);
  }
}

// Samples one index with probability proportional to weights[i].
// Non-positive total weight falls back to uniform choice.
inline std::size_t next_weighted_index(std::mt19937_64& gen,
                                       const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w > 0.0 ? w : 0.0;
  if (total <= 0.0) return next_index(gen, weights.size());
  double r = next_unit(gen) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i] > 0.0 ? weights[i] : 0.0;
    if (r < w || i + 1 == weights.size()) return i;
    r -= w;
  }
  return weights.size() - 1;
}

}  // namespace cskit
