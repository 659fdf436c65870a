#pragma once

#include <cstddef>
#include <functional>

namespace sta {

/// Worker threads used for per-process work in simulated execution. Read from
/// STA_WORKERS at first use (default 1); set_worker_count overrides it.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs fn(i) for i in [0, count). Iterations must touch disjoint state; the
/// caller merges results in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace sta
