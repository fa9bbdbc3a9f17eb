#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "balmatch/profile_space.hpp"

namespace balmatch {

inline int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Splits [0, total) into `workers` contiguous ranges and runs
/// fn(part, range) for each, one thread per part. The first exception thrown
/// by any part is rethrown on the calling thread. Callers merge per-part
/// results in part order, so output does not depend on scheduling.
template <class Fn>
void parallel_ranges(std::uint64_t total, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (total < static_cast<std::uint64_t>(workers)) workers = std::max<int>(1, static_cast<int>(total));
  const auto ranges = split_range(total, workers);
  if (workers == 1) {
    fn(0, ranges[0]);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(ranges.size());
    for (std::size_t part = 0; part < ranges.size(); ++part) {
      threads.emplace_back([&, part] {
        try {
          fn(static_cast<int>(part), ranges[part]);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Number of parts parallel_ranges will actually use.
inline int effective_parts(std::uint64_t total, int workers) {
  workers = std::max(1, workers);
  if (total < static_cast<std::uint64_t>(workers)) workers = std::max<int>(1, static_cast<int>(total));
  return workers;
}

}  // namespace balmatch
