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

// Hand-built histories, each with a single defect no legal sequential order
// can explain.

#ifndef DCVEB_TESTS_VIOLATIONS_HPP
#define DCVEB_TESTS_VIOLATIONS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcveb/harness/history.hpp"

namespace fixtures {

using dcveb::op_code;

struct timed_call {
  unsigned thread;
  std::uint64_t invoked;
  std::uint64_t responded;
  dcveb::operation<int> op;
  std::optional<dcveb::entry<int>> result;
};

inline dcveb::history<int> build(std::vector<timed_call> calls) {
  dcveb::history<int> h;
  for (const auto& c : calls) {
    h.invoke(c.invoked, c.thread, c.op);
    h.respond(c.responded, c.thread, c.op, c.result);
  }
  std::stable_sort(h.events.begin(), h.events.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return h;
}

inline dcveb::operation<int> ins(dcveb::key_type k, int v) { return {op_code::insert, k, v}; }
inline dcveb::operation<int> del(dcveb::key_type k) { return {op_code::erase, k, 0}; }
inline dcveb::operation<int> get(dcveb::key_type k) { return {op_code::get, k, 0}; }
inline dcveb::operation<int> succ(dcveb::key_type k) { return {op_code::successor, k, 0}; }
inline dcveb::operation<int> pred(dcveb::key_type k) { return {op_code::predecessor, k, 0}; }
inline dcveb::operation<int> min() { return {op_code::minimum, 0, 0}; }
inline dcveb::entry<int> e(dcveb::key_type k, int v) { return {k, v}; }
inline constexpr std::nullopt_t none = std::nullopt;

struct named_history {
  std::string name;
  dcveb::history<int> h;
};

inline std::vector<named_history> violating_histories() {
  return {
      {"read-from-nowhere", build({{0, 0, 1, get(1), e(1, 7)}})},
      {"lost-completed-insert", build({{0, 0, 1, ins(1, 7), none}, {1, 2, 3, get(1), none}})},
      {"resurrected-after-erase",
       build({{0, 0, 1, ins(1, 7), none}, {0, 2, 3, del(1), none}, {1, 4, 5, get(1), e(1, 7)}})},
      {"stale-overwritten-value",
       build({{0, 0, 1, ins(1, 7), none}, {0, 2, 3, ins(1, 8), none}, {1, 4, 5, get(1), e(1, 7)}})},
      {"successor-skips-present-key",
       build({{0, 0, 1, ins(3, 1), none}, {0, 2, 3, ins(5, 2), none}, {1, 4, 5, succ(0), e(5, 2)}})},
      {"successor-below-query",
       build({{0, 0, 1, ins(2, 1), none}, {1, 2, 3, succ(3), e(2, 1)}})},
      {"predecessor-misses-completed-insert",
       build({{0, 0, 1, ins(2, 1), none}, {1, 2, 3, pred(9), none}})},
      {"minimum-not-smallest",
       build({{0, 0, 1, ins(2, 1), none}, {0, 2, 3, ins(4, 2), none}, {1, 4, 5, min(), e(4, 2)}})},
      {"flicker-without-writer",
       build({{0, 0, 5, ins(1, 7), none},
              {1, 1, 2, get(1), e(1, 7)},
              {1, 6, 7, get(1), none}})},
      {"concurrent-readers-disagree-on-order",
       // Both inserts overlap both reads, but the reads see them in opposite
       // orders and cannot both be right.
       build({{0, 0, 9, ins(1, 1), none},
              {1, 0, 9, ins(1, 2), none},
              {2, 1, 2, get(1), e(1, 1)},
              {2, 3, 4, get(1), e(1, 2)},
              {3, 1, 2, get(1), e(1, 2)},
              {3, 3, 4, get(1), e(1, 1)}})},
  };
}

}  // namespace fixtures

#endif  // DCVEB_TESTS_VIOLATIONS_HPP
