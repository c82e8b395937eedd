// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file parallel.hpp
 * @brief Bounded worker pool over trial indices.
 *
 * Trials are claimed from an atomic counter; completed results are handed to
 * the consumer strictly in index order under a single lock, so anything the
 * consumer writes or folds is independent of the worker count.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace anderson {

/// Worker count when none is requested: $ANDERSON_LAB_WORKERS if set to a
/// positive integer, else the hardware concurrency (at least 1).
unsigned default_worker_count();

/// Runs produce(i) for i in [0, count) on up to `workers` threads
/// (0 = default_worker_count()) and calls consume(i, result) in increasing i.
/// The first exception from either callback stops new trials and is rethrown
/// after all threads join; results consumed before it stay consumed.
template <class Produce, class Consume>
void run_indexed(std::uint64_t count, unsigned workers, Produce&& produce, Consume&& consume) {
  using Result = decltype(produce(std::uint64_t{0}));
  if (workers == 0) workers = default_worker_count();
  if (count < workers) workers = static_cast<unsigned>(count > 0 ? count : 1);

  std::atomic<std::uint64_t> next_claim{0};
  std::atomic<bool> stop{false};
  std::mutex lock;
  std::map<std::uint64_t, Result> pending;
  std::uint64_t next_consume = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::uint64_t i = next_claim.fetch_add(1);
      if (i >= count) return;
      std::optional<Result> value;
      try {
        value.emplace(produce(i));
      } catch (...) {
        std::lock_guard guard(lock);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
      std::lock_guard guard(lock);
      if (failure) return;
      pending.emplace(i, std::move(*value));
      try {
        for (auto it = pending.find(next_consume); it != pending.end();
             it = pending.find(next_consume)) {
          consume(next_consume, std::move(it->second));
          pending.erase(it);
          ++next_consume;
        }
      } catch (...) {
        failure = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Collects produce(i) for every index, in index order.
template <class Produce>
auto parallel_map(std::uint64_t count, unsigned workers, Produce&& produce) {
  using Result = decltype(produce(std::uint64_t{0}));
  std::vector<Result> out;
  out.reserve(count);
  run_indexed(count, workers, produce,
              [&](std::uint64_t, Result&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace anderson
