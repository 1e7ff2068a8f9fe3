#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace glv {

// Worker count used by nodewise loops. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into a fixed number of blocks that depends only on n, then
// hands blocks to workers. Per-block partial results summed in block order
// are therefore identical for any thread count.
std::size_t block_count(std::size_t n);
void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t block, std::size_t begin,
                                              std::size_t end)>& body);

inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  parallel_blocks(n, [&](std::size_t, std::size_t b, std::size_t e) { body(b, e); });
}

// Deterministic sum of per-block contributions.
template <class T, class F>
T parallel_sum(std::size_t n, F&& block_value) {
  std::vector<T> part(block_count(n), T{});
  parallel_blocks(n, [&](std::size_t k, std::size_t b, std::size_t e) {
    part[k] = block_value(b, e);
  });
  T total{};
  for (const T& p : part) total += p;
  return total;
}

}  // namespace glv
