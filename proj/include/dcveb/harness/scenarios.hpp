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

#ifndef DCVEB_HARNESS_SCENARIOS_HPP
#define DCVEB_HARNESS_SCENARIOS_HPP

/// \file
/// Two-thread races driven through hook points, each reproducing one window
/// the structure has to defend.
///
///  - insert-vs-trim: a delete empties every root child but 0 and heads for
///    the trim while an insert holds the root and is about to occupy another
///    child. The insert must survive and the trim must back off.
///  - grow-vs-delete-residue: an insert grows the tree while a delete empties
///    the old root, leaving child-0 bits over an empty subtree. The residue
///    must be gone once both finish.
///  - two-inserters-one-parent: two inserts set sibling bits in the same
///    summary at the same time. Both bits must survive.

#include <chrono>
#include <cstdint>
#include <random>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dcveb/harness/hooks.hpp"
#include "dcveb/harness/walk.hpp"

namespace dcveb {

struct scenario_result {
  std::string name;
  unsigned iterations = 0;
  unsigned walk_violations = 0;
  unsigned lost_inserts = 0;
  unsigned wrong_contents = 0;
  std::vector<std::string> failures;  // first few, for diagnostics

  [[nodiscard]] bool passed() const noexcept {
    return walk_violations == 0 && lost_inserts == 0 && wrong_contents == 0;
  }
};

[[nodiscard]] inline std::vector<std::string> scenario_names() {
  return {"insert-vs-trim", "grow-vs-delete-residue", "two-inserters-one-parent"};
}

namespace detail {

using scripted_array = dcveb_array<int, scripted_hooks>;

// Lets a thread parked in a lock queue get there before the next release.
inline void settle() {
  for (int i = 0; i < 50; ++i) std::this_thread::yield();
  std::this_thread::sleep_for(std::chrono::microseconds(200));
}

struct pause_point {
  std::binary_semaphore reached{0};
  std::binary_semaphore resume{0};

  void park() {
    reached.release();
    resume.acquire();
  }
};

inline void record(scenario_result& r, const char* what, unsigned iteration,
                   const std::string& detail) {
  if (r.failures.size() < 8)
    r.failures.push_back(std::string{what} + " at iteration " +
                         std::to_string(iteration) + ": " + detail);
}

inline void check_walk(scenario_result& r, const scripted_array& a, unsigned it) {
  const auto report = quiescent_walk(a);
  if (report.ok()) return;
  ++r.walk_violations;
  record(r, "walk violation", it,
         report.violations.front().invariant + " at " + report.violations.front().path);
}

// n = 4. Starts at height 2 with keys {1, 5}. The deleter removes 5, which
// leaves the root with only child 0, and stops just before the trim locks.
// The inserter adds 9 (root child 2).
inline void insert_vs_trim(scenario_result& r, unsigned it, std::mt19937_64& rng) {
  scripted_array a{4};
  a.insert(1, 1);
  a.insert(5, 5);

  pause_point trim_pause;
  pause_point insert_pause;
  // 0: inserter parks holding the root read lock.
  // 1: inserter parks holding the parameter lock in shared mode.
  // 2: inserter runs only after the trim completed.
  const auto variant = static_cast<unsigned>(rng() % 3);
  bool insert_parked = false;

  a.hooks().actions->before_trim_lock = [&](int role) {
    if (role == 1) trim_pause.park();
  };
  a.hooks().actions->step = [&](int role, op_kind k) {
    if (role == 2 && k == op_kind::insert && variant == 0 && !insert_parked) {
      insert_parked = true;
      insert_pause.park();
    }
  };
  a.hooks().actions->after_snapshot = [&](int role, op_kind k) {
    if (role == 2 && k == op_kind::insert && variant == 1 && !insert_parked) {
      insert_parked = true;
      insert_pause.park();
    }
  };

  std::thread deleter{[&] {
    scenario_role = 1;
    a.erase(5);
  }};
  trim_pause.reached.acquire();

  if (variant == 2) {
    trim_pause.resume.release();
    deleter.join();
    std::thread inserter{[&] {
      scenario_role = 2;
      a.insert(9, 9);
    }};
    inserter.join();
  } else {
    std::thread inserter{[&] {
      scenario_role = 2;
      a.insert(9, 9);
    }};
    insert_pause.reached.acquire();
    trim_pause.resume.release();
    settle();  // deleter now queues on the lock the inserter holds
    insert_pause.resume.release();
    inserter.join();
    deleter.join();
  }

  if (!a.get(9)) {
    ++r.lost_inserts;
    record(r, "lost insert", it, "key 9, variant " + std::to_string(variant));
  }
  if (!a.get(1) || a.get(5)) {
    ++r.wrong_contents;
    record(r, "wrong contents", it, "variant " + std::to_string(variant));
  }
  check_walk(r, a, it);
}

// n = 4. Starts at height 1 with one key d < 4. The inserter adds 100, which
// needs height 4, and parks right before publishing its grown record while
// holding the old root. The deleter removes d from the old snapshot.
inline void grow_vs_delete_residue(scenario_result& r, unsigned it, std::mt19937_64& rng) {
  scripted_array a{4};
  const key_type d = rng() % 4;
  a.insert(d, 1);

  pause_point publish_pause;
  pause_point cleanup_pause;
  // 0: the delete queues behind the grow, then finds the tree grown.
  // 1: the delete empties the old root first and parks before its clean-up
  //    loop; the grow then runs over an empty root.
  const auto variant = static_cast<unsigned>(rng() % 2);

  a.hooks().actions->before_publish = [&](int role, op_kind k) {
    if (role == 2 && k == op_kind::insert && variant == 0) publish_pause.park();
  };
  a.hooks().actions->after_del_intern = [&](int role) {
    if (role == 1 && variant == 1) cleanup_pause.park();
  };

  auto insert_big = [&] {
    scenario_role = 2;
    a.insert(100, 100);
  };
  auto erase_d = [&] {
    scenario_role = 1;
    a.erase(d);
  };

  if (variant == 0) {
    std::thread inserter{insert_big};
    publish_pause.reached.acquire();
    std::thread deleter{erase_d};
    settle();  // deleter now queues on the old root
    publish_pause.resume.release();
    inserter.join();
    deleter.join();
  } else {
    std::thread deleter{erase_d};
    cleanup_pause.reached.acquire();
    std::thread inserter{insert_big};
    inserter.join();
    cleanup_pause.resume.release();
    deleter.join();
  }

  if (!a.get(100)) {
    ++r.lost_inserts;
    record(r, "lost insert", it, "key 100, variant " + std::to_string(variant));
  }
  if (a.get(d)) {
    ++r.wrong_contents;
    record(r, "wrong contents", it, "deleted key " + std::to_string(d) + " still present");
  }
  check_walk(r, a, it);
}

// n = 4, empty root. Both inserters park after taking the root read lock and
// before touching its summary.
inline void two_inserters_one_parent(scenario_result& r, unsigned it, std::mt19937_64& rng) {
  scripted_array a{4};
  const key_type k1 = rng() % 4;
  key_type k2 = rng() % 3;
  if (k2 >= k1) ++k2;

  pause_point first;
  pause_point second;
  a.hooks().actions->step = [&](int role, op_kind k) {
    if (k != op_kind::insert) return;
    if (role == 1) first.park();
    if (role == 2) second.park();
  };

  std::thread t1{[&] {
    scenario_role = 1;
    a.insert(k1, 1);
  }};
  std::thread t2{[&] {
    scenario_role = 2;
    a.insert(k2, 2);
  }};
  first.reached.acquire();
  second.reached.acquire();
  first.resume.release();
  second.resume.release();
  t1.join();
  t2.join();

  if (!a.get(k1) || !a.get(k2)) {
    ++r.lost_inserts;
    record(r, "lost insert", it, "keys " + std::to_string(k1) + "," + std::to_string(k2));
  }
  const auto expected = a.branching().child_mask(static_cast<child_pos>(k1)) |
                        a.branching().child_mask(static_cast<child_pos>(k2));
  if (debug_access::root_summary(a) != expected) {
    ++r.wrong_contents;
    record(r, "summary", it, "both sibling bits expected");
  }
  check_walk(r, a, it);
}

}  // namespace detail

/// Runs a named scenario for the given number of iterations.
inline scenario_result run_scenario(const std::string& name, unsigned iterations = 1,
                                    std::uint64_t seed = 1) {
  using fn = void (*)(scenario_result&, unsigned, std::mt19937_64&);
  fn body = nullptr;
  if (name == "insert-vs-trim") body = detail::insert_vs_trim;
  if (name == "grow-vs-delete-residue") body = detail::grow_vs_delete_residue;
  if (name == "two-inserters-one-parent") body = detail::two_inserters_one_parent;
  if (body == nullptr) throw std::invalid_argument("unknown scenario: " + name);

  scenario_result r;
  r.name = name;
  std::mt19937_64 rng{seed};
  for (unsigned it = 0; it < iterations; ++it) {
    body(r, it, rng);
    ++r.iterations;
  }
  return r;
}

}  // namespace dcveb

#endif  // DCVEB_HARNESS_SCENARIOS_HPP
