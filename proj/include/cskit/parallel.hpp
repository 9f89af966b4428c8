#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cskit {

// Work is pre-partitioned into numbered slots whose composition never
// depends on the worker count; callers reduce slot results in slot order,
// which keeps floating-point sums bitwise identical for any --threads N.
inline void run_slots(std::size_t num_slots, int threads,
                      const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || num_slots <= 1) {
    for (std::size_t s = 0; s < num_slots; ++s) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), num_slots);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = w; s < num_slots; s += workers) fn(s);
    });
  }
  for (auto& t : pool) t.join();
}

// Fixed slot count for gradient/assignment accumulators.
inline constexpr std::size_t kReduceSlots = 16;

inline int default_threads() {
  if (const char* env = std::getenv("CSKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace cskit
