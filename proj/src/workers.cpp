#include "sta/workers.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace sta {

namespace {

std::size_t env_workers() {
  const char* s = std::getenv("STA_WORKERS");
  if (!s) return 1;
  const long v = std::strtol(s, nullptr, 10);
  return v > 0 ? static_cast<std::size_t>(v) : 1;
}

std::atomic<std::size_t>& workers() {
  static std::atomic<std::size_t> n{env_workers()};
  return n;
}

}  // namespace

std::size_t worker_count() { return workers().load(); }
void set_worker_count(std::size_t n) { workers().store(std::max<std::size_t>(1, n)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t nw = std::min(worker_count(), count);
  if (nw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

}  // namespace sta
