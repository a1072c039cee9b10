#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "bincat/random.hpp"
#include "bincat/types.hpp"

namespace bincat {

/// How a Monte Carlo job is split. Results depend on (base_seed, tasks)
/// only; `threads` just sets how many tasks run at once.
struct ShardPlan {
  std::uint64_t base_seed = 0;
  std::size_t tasks = 16;
  std::size_t threads = 1;
};

/// Splits `total` work items into plan.tasks shards. Shard i draws from
/// make_stream(base_seed, i) and runs fn(rng, count, i). Results come back
/// in shard order regardless of scheduling.
template <class Result, class Fn>
std::vector<Result> run_shards(Count total, const ShardPlan& plan, Fn&& fn) {
  const std::size_t tasks = std::max<std::size_t>(1, plan.tasks);
  std::vector<Result> results(tasks);
  auto work = [&](std::size_t i) {
    const Count share = total / tasks + (i < total % tasks ? 1 : 0);
    Engine rng = make_stream(plan.base_seed, i);
    results[i] = fn(rng, share, i);
  };
  const std::size_t threads = std::clamp<std::size_t>(plan.threads, 1, tasks);
  if (threads == 1) {
    for (std::size_t i = 0; i < tasks; ++i) work(i);
    return results;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < tasks; i += threads) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace bincat
