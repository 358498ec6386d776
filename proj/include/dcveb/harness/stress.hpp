/*
 * Copyright 2026 The dcveb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DCVEB_HARNESS_STRESS_HPP
#define DCVEB_HARNESS_STRESS_HPP

/// \file
/// Fixed-work stress run followed by a quiescent walk.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dcveb/harness/walk.hpp"

namespace dcveb {

struct stress_config {
  unsigned getters = 2;
  unsigned inserters = 2;
  unsigned removers = 2;
  unsigned successors = 2;
  std::uint64_t ops_per_thread = 100000;
  key_type key_range = 10000;
  unsigned seconds_cap = 120;
  unsigned branching = 64;
  std::uint64_t seed = 1;
};

struct stress_outcome {
  walk_report report;
  std::uint64_t operations = 0;
  double seconds = 0;
};

namespace detail {

inline void validate(const stress_config& cfg) {
  if (cfg.getters + cfg.inserters + cfg.removers + cfg.successors == 0)
    throw std::invalid_argument("stress needs at least one thread");
  if (cfg.ops_per_thread == 0) throw std::invalid_argument("ops_per_thread must be positive");
  if (cfg.key_range == 0) throw std::invalid_argument("key_range must be positive");
  if (cfg.seconds_cap == 0) throw std::invalid_argument("seconds_cap must be positive");
}

// Aborts the process if the guarded scope outlives its deadline. A deadlock
// cannot be unwound, so there is nothing better to do than say so and stop.
class watchdog {
 public:
  explicit watchdog(unsigned seconds)
      : thread_{[this, seconds] {
          std::unique_lock lk{m_};
          if (!cv_.wait_for(lk, std::chrono::seconds(seconds), [this] { return done_; })) {
            std::fprintf(stderr, "dcveb stress: deadlock suspected after %u s\n", seconds);
            std::fflush(stderr);
            std::abort();
          }
        }} {}

  ~watchdog() {
    {
      std::lock_guard lk{m_};
      done_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  bool done_ = false;
  std::thread thread_;
};

}  // namespace detail

/// Runs getters, inserters, removers and successor searchers, each doing a
/// fixed number of calls on uniformly random keys, then walks the result.
template <class T = std::uint64_t, class H = no_hooks>
stress_outcome run_stress(const stress_config& cfg, dcveb_array<T, H>& array) {
  detail::validate(cfg);
  enum group { g_get, g_insert, g_remove, g_succ };
  const unsigned counts[] = {cfg.getters, cfg.inserters, cfg.removers, cfg.successors};

  const auto started = std::chrono::steady_clock::now();
  {
    detail::watchdog dog{cfg.seconds_cap};
    std::vector<std::thread> pool;
    for (unsigned grp = 0; grp < 4; ++grp) {
      for (unsigned idx = 0; idx < counts[grp]; ++idx) {
        pool.emplace_back([&, grp, idx] {
          std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                            static_cast<std::uint32_t>(cfg.seed >> 32), grp, idx};
          std::mt19937_64 rng{seq};
          std::uniform_int_distribution<key_type> keys{0, cfg.key_range - 1};
          for (std::uint64_t i = 0; i < cfg.ops_per_thread; ++i) {
            const auto k = keys(rng);
            switch (grp) {
              case g_get: (void)array.get(k); break;
              case g_insert: array.insert(k, static_cast<T>(k)); break;
              case g_remove: array.erase(k); break;
              default: (void)array.successor(k); break;
            }
          }
        });
      }
    }
    for (auto& t : pool) t.join();
  }
  stress_outcome out;
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out.operations = static_cast<std::uint64_t>(counts[0] + counts[1] + counts[2] + counts[3]) *
                   cfg.ops_per_thread;
  out.report = quiescent_walk(array);
  return out;
}

template <class T = std::uint64_t>
stress_outcome run_stress(const stress_config& cfg) {
  dcveb_array<T> array{cfg.branching};
  return run_stress(cfg, array);
}

}  // namespace dcveb

#endif  // DCVEB_HARNESS_STRESS_HPP
