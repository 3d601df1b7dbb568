#pragma once

// Replicate-level parallelism. Every kernel that loops over independent
// replicates takes an Exec policy; kSerial is the reference path and the
// OpenMP path must produce bit-identical results because each replicate draws
// from its own derived stream and writes into its own slot.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

#include <omp.h>

namespace srt {

enum class Exec { kSerial, kParallel };

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int max_threads() { return omp_get_max_threads(); }

template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::kSerial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace srt
