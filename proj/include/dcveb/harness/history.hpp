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

#ifndef DCVEB_HARNESS_HISTORY_HPP
#define DCVEB_HARNESS_HISTORY_HPP

/// \file
/// Concurrent history recording against a fresh dcveb_array.

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cstdint>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dcveb/dcveb_array.hpp"
#include "dcveb/harness/hooks.hpp"
#include "dcveb/reference_oracle.hpp"

namespace dcveb {

enum class event_kind { invoke, respond };

template <class T>
struct event {
  std::uint64_t tick;
  unsigned thread;
  event_kind kind;
  operation<T> op;
  op_result<T> result;  // meaningful on respond only

  friend bool operator==(const event&, const event&) = default;
};

template <class T>
struct history {
  std::vector<event<T>> events;

  void invoke(std::uint64_t tick, unsigned thread, operation<T> op) {
    events.push_back({tick, thread, event_kind::invoke, std::move(op), {}});
  }
  void respond(std::uint64_t tick, unsigned thread, operation<T> op,
               op_result<T> result) {
    events.push_back({tick, thread, event_kind::respond, std::move(op), std::move(result)});
  }
};

/// One line per event: `tick thread kind op args result`.
template <class T>
void dump(std::ostream& out, const history<T>& h) {
  for (const auto& e : h.events) {
    out << e.tick << ' ' << e.thread << ' '
        << (e.kind == event_kind::invoke ? "invoke" : "respond") << ' '
        << to_string(e.op.code);
    switch (e.op.code) {
      case op_code::insert: out << " (" << e.op.key << ',' << e.op.value << ')'; break;
      case op_code::minimum:
      case op_code::maximum: out << " ()"; break;
      default: out << " (" << e.op.key << ')'; break;
    }
    if (e.kind == event_kind::invoke) {
      out << " -";
    } else if (e.result) {
      out << " (" << e.result->key << ',' << e.result->value << ')';
    } else {
      out << " none";
    }
    out << '\n';
  }
}

template <class T>
std::string dump(const history<T>& h) {
  std::ostringstream out;
  dump(out, h);
  return out.str();
}

struct record_config {
  unsigned threads = 3;
  unsigned ops_per_thread = 4;
  key_type key_range = 8;
  std::uint64_t seed = 1;
  unsigned branching = 2;
};

/// Runs randomized insert/erase/get/successor/predecessor calls from several
/// threads against a fresh array and logs every invocation and response.
/// Inserted payloads are unique so a wrong read cannot hide behind a
/// coincidentally equal value.
inline history<int> record_history(const record_config& cfg) {
  dcveb_array<int, chaos_hooks> array{cfg.branching};
  std::atomic<std::uint64_t> clock{0};
  std::vector<history<int>> local(cfg.threads);
  std::barrier start{static_cast<std::ptrdiff_t>(cfg.threads)};

  auto worker = [&](unsigned t) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32), t};
    std::mt19937_64 rng{seq};
    chaos_hooks::seed_thread(rng());
    start.arrive_and_wait();
    for (unsigned i = 0; i < cfg.ops_per_thread; ++i) {
      operation<int> op{};
      switch (rng() % 5) {
        case 0: op.code = op_code::insert; break;
        case 1: op.code = op_code::erase; break;
        case 2: op.code = op_code::get; break;
        case 3: op.code = op_code::successor; break;
        default: op.code = op_code::predecessor; break;
      }
      op.key = rng() % cfg.key_range;
      if (op.code == op_code::insert) op.value = static_cast<int>(t * 1000 + i + 1);
      local[t].invoke(clock.fetch_add(1, std::memory_order_acq_rel), t, op);
      auto result = apply_to(array, op);
      local[t].respond(clock.fetch_add(1, std::memory_order_acq_rel), t, op,
                       std::move(result));
    }
  };

  std::vector<std::thread> pool;
  for (unsigned t = 0; t < cfg.threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();

  history<int> merged;
  for (auto& h : local)
    merged.events.insert(merged.events.end(), h.events.begin(), h.events.end());
  std::sort(merged.events.begin(), merged.events.end(),
            [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return merged;
}

}  // namespace dcveb

#endif  // DCVEB_HARNESS_HISTORY_HPP
