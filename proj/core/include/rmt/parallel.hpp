#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "rmt/common.hpp"

namespace rmt {

/// Worker count from RMT_WORKERS, else the hardware concurrency.
Index worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Work
/// items must write to disjoint outputs; the first exception is rethrown
/// after all workers stop.
template <class Body>
void parallel_for(Index count, Body&& body, Index workers = 0) {
  if (workers == 0) workers = worker_count();
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (Index w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// parallel_for collecting one result per index, in index order.
template <class T, class Body>
std::vector<T> parallel_map(Index count, Body&& body, Index workers = 0) {
  std::vector<T> out(count);
  parallel_for(count, [&](Index i) { out[i] = body(i); }, workers);
  return out;
}

}  // namespace rmt
