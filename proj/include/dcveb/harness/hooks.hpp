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

#ifndef DCVEB_HARNESS_HOOKS_HPP
#define DCVEB_HARNESS_HOOKS_HPP

/// \file
/// Hook policies for test builds of dcveb_array.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <thread>

#include "dcveb/dcveb_array.hpp"

namespace dcveb {

/// Yields at every hook point with a fixed probability. On a machine with few
/// cores this is what makes concurrent operations actually overlap.
struct chaos_hooks {
  unsigned yield_per_mille = 300;

  void after_snapshot(op_kind) { maybe_yield(); }
  void before_publish(op_kind) { maybe_yield(); }
  void before_trim_lock() { maybe_yield(); }
  void after_del_intern() { maybe_yield(); }
  void step(op_kind) { maybe_yield(); }

  /// Reseeds the calling thread's yield decisions.
  static void seed_thread(std::uint64_t seed) { rng().seed(seed); }

 private:
  static std::minstd_rand& rng() {
    thread_local std::minstd_rand r{std::random_device{}()};
    return r;
  }
  void maybe_yield() const {
    if (rng()() % 1000 < yield_per_mille) std::this_thread::yield();
  }
};

/// Role of the calling thread inside a scripted scenario; 0 means unscripted.
inline thread_local int scenario_role = 0;

/// Callbacks a scenario installs per hook point. Each receives the role of
/// the calling thread.
struct script {
  std::function<void(int, op_kind)> after_snapshot;
  std::function<void(int, op_kind)> before_publish;
  std::function<void(int)> before_trim_lock;
  std::function<void(int)> after_del_intern;
  std::function<void(int, op_kind)> step;
};

struct scripted_hooks {
  std::shared_ptr<script> actions = std::make_shared<script>();

  void after_snapshot(op_kind k) {
    if (actions->after_snapshot) actions->after_snapshot(scenario_role, k);
  }
  void before_publish(op_kind k) {
    if (actions->before_publish) actions->before_publish(scenario_role, k);
  }
  void before_trim_lock() {
    if (actions->before_trim_lock) actions->before_trim_lock(scenario_role);
  }
  void after_del_intern() {
    if (actions->after_del_intern) actions->after_del_intern(scenario_role);
  }
  void step(op_kind k) {
    if (actions->step) actions->step(scenario_role, k);
  }
};

}  // namespace dcveb

#endif  // DCVEB_HARNESS_HOOKS_HPP
