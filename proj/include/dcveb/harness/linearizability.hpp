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

#ifndef DCVEB_HARNESS_LINEARIZABILITY_HPP
#define DCVEB_HARNESS_LINEARIZABILITY_HPP

/// \file
/// Exhaustive linearizability search against the reference oracle.
///
/// Depth-first over linearization orders: at each step any pending operation
/// not preceded in real time by another pending one may go next, provided the
/// oracle reproduces its recorded result. Visited (completed set, oracle
/// state) pairs are memoized.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dcveb/harness/history.hpp"
#include "dcveb/reference_oracle.hpp"

namespace dcveb {

/// A completed call: matching invoke/respond pair.
template <class T>
struct call {
  unsigned thread;
  operation<T> op;
  op_result<T> result;
  std::uint64_t invoked;
  std::uint64_t responded;
};

/// Thrown for histories that are not well formed.
class malformed_history : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pairs invocations with responses. Per thread the events must alternate
/// starting with an invocation, every invocation must be answered, and ticks
/// must never decrease.
template <class T>
std::vector<call<T>> calls_of(const history<T>& h) {
  std::vector<call<T>> calls;
  std::map<unsigned, std::size_t> open;  // thread -> index into calls
  std::uint64_t last_tick = 0;
  for (const auto& e : h.events) {
    if (e.tick < last_tick)
      throw malformed_history("tick " + std::to_string(e.tick) + " goes backwards");
    last_tick = e.tick;
    auto it = open.find(e.thread);
    if (e.kind == event_kind::invoke) {
      if (it != open.end())
        throw malformed_history("thread " + std::to_string(e.thread) +
                                " invokes twice without a response");
      open.emplace(e.thread, calls.size());
      calls.push_back({e.thread, e.op, {}, e.tick, 0});
    } else {
      if (it == open.end())
        throw malformed_history("thread " + std::to_string(e.thread) +
                                " responds without an invocation");
      auto& c = calls[it->second];
      if (!(c.op == e.op))
        throw malformed_history("thread " + std::to_string(e.thread) +
                                " responds to a different operation");
      c.result = e.result;
      c.responded = e.tick;
      open.erase(it);
    }
  }
  if (!open.empty()) throw malformed_history("history ends with a pending invocation");
  return calls;
}

/// Real-time order: a finished before b started. Equal ticks are concurrent.
template <class T>
[[nodiscard]] bool precedes(const call<T>& a, const call<T>& b) noexcept {
  return a.responded < b.invoked;
}

template <class T>
struct check_result {
  bool linearizable = false;
  std::vector<std::size_t> witness;          // call indices in linearization order
  std::vector<event<T>> counterexample;      // on failure
};

/// Replays a proposed order through the oracle and checks it against both
/// the recorded results and real-time precedence.
template <class T>
[[nodiscard]] bool verify_witness(const std::vector<call<T>>& calls,
                                  const std::vector<std::size_t>& order) {
  if (order.size() != calls.size()) return false;
  std::vector<bool> seen(calls.size(), false);
  for (auto i : order) {
    if (i >= calls.size() || seen[i]) return false;
    seen[i] = true;
  }
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b)
      if (precedes(calls[order[b]], calls[order[a]])) return false;
  reference_oracle<T> oracle;
  for (auto i : order)
    if (!(oracle.apply(calls[i].op) == calls[i].result)) return false;
  return true;
}

namespace detail {

template <class T>
class wing_gong {
 public:
  explicit wing_gong(const std::vector<call<T>>& calls) : calls_{calls} {
    if (calls.size() > 64)
      throw std::invalid_argument("at most 64 calls per history are checkable");
    full_ = calls.size() == 64 ? ~std::uint64_t{0}
                               : (std::uint64_t{1} << calls.size()) - 1;
  }

  bool run() { return search(0, reference_oracle<T>{}); }

  std::vector<std::size_t> witness;
  std::vector<std::size_t> deepest;
  std::vector<std::size_t> stuck_on;

 private:
  bool search(std::uint64_t done, const reference_oracle<T>& oracle) {
    if (done == full_) return true;
    if (!visited_.emplace(done, oracle.state()).second) return false;

    std::vector<std::size_t> minimal;
    for (std::size_t i = 0; i < calls_.size(); ++i) {
      if (done >> i & 1) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < calls_.size() && !blocked; ++j)
        blocked = !(done >> j & 1) && j != i && precedes(calls_[j], calls_[i]);
      if (!blocked) minimal.push_back(i);
    }

    for (auto i : minimal) {
      auto [result, next] = apply(calls_[i].op, oracle);
      if (!(result == calls_[i].result)) continue;
      witness.push_back(i);
      if (search(done | std::uint64_t{1} << i, next)) return true;
      witness.pop_back();
    }
    if (witness.size() >= deepest.size()) {
      deepest = witness;
      stuck_on = minimal;
    }
    return false;
  }

  const std::vector<call<T>>& calls_;
  std::uint64_t full_ = 0;
  std::set<std::pair<std::uint64_t, typename reference_oracle<T>::state_type>> visited_;
};

}  // namespace detail

/// Decides whether h admits a legal sequential witness. An accepted history
/// comes with the witness, re-verified before returning. A rejected one comes
/// with the events of the longest linearizable prefix followed by the calls
/// none of which could be placed next.
template <class T>
check_result<T> check_linearizable(const history<T>& h) {
  const auto calls = calls_of(h);
  detail::wing_gong<T> search{calls};
  check_result<T> out;
  if (search.run()) {
    if (!verify_witness(calls, search.witness))
      throw std::logic_error("linearizability search produced an invalid witness");
    out.linearizable = true;
    out.witness = std::move(search.witness);
    return out;
  }
  auto emit = [&](std::size_t i) {
    const auto& c = calls[i];
    out.counterexample.push_back({c.invoked, c.thread, event_kind::invoke, c.op, {}});
    out.counterexample.push_back({c.responded, c.thread, event_kind::respond, c.op, c.result});
  };
  for (auto i : search.deepest) emit(i);
  for (auto i : search.stuck_on) emit(i);
  return out;
}

}  // namespace dcveb

#endif  // DCVEB_HARNESS_LINEARIZABILITY_HPP
