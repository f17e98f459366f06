#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace mlm::internal {

// Runs fn(block) for block = 0..n_blocks-1 across `workers` threads. Blocks
// write into disjoint slots indexed by block, so the caller can reduce them
// in block order and get results independent of the worker count.
inline void run_blocks(std::uint64_t n_blocks, int workers, const std::function<void(std::uint64_t)>& fn) {
  if (workers <= 1 || n_blocks <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<std::uint64_t>(workers, n_blocks);
  pool.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace mlm::internal
