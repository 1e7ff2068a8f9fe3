#include "glv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace glv {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_threads = n;
}

unsigned thread_count() { return g_threads; }

std::size_t block_count(std::size_t n) {
  if (n == 0) return 0;
  return std::min<std::size_t>(n, 64);
}

void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t nb = block_count(n);
  if (nb == 0) return;
  auto range = [&](std::size_t k) {
    return std::pair<std::size_t, std::size_t>{n * k / nb, n * (k + 1) / nb};
  };
  const unsigned nt = std::min<std::size_t>(thread_count(), nb);
  if (nt <= 1) {
    for (std::size_t k = 0; k < nb; ++k) {
      auto [b, e] = range(k);
      body(k, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= nb) return;
      try {
        auto [b, e] = range(k);
        body(k, b, e);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace glv
