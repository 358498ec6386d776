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

#ifndef DCVEB_HARNESS_DEBUG_ACCESS_HPP
#define DCVEB_HARNESS_DEBUG_ACCESS_HPP

/// \file
/// Test-only window into dcveb_array internals, including fault injection.
/// None of this is safe while other threads mutate the structure.

#include <atomic>
#include <vector>

#include "dcveb/dcveb_array.hpp"

namespace dcveb {

struct debug_access {
  template <class A>
  static const detail::array_param* params(const A& a) noexcept {
    return a.ap_.load(std::memory_order_acquire);
  }

  template <class A>
  static detail::inner_node* root(const A& a) noexcept {
    return params(a)->root;
  }

  template <class A>
  static summary_word root_summary(const A& a) noexcept {
    return root(a)->summary.load(std::memory_order_acquire);
  }

  /// Level at which the lookup path for key stops; equals the height when it
  /// reaches a leaf.
  template <class A>
  static unsigned path_reach(const A& a, key_type key) {
    epoch::guard g;
    typename A::trail t;
    a.make_path(key, params(a), t);
    return t.reached;
  }

  /// Internal node at the given child-position path, or null.
  template <class A>
  static detail::inner_node* node_at(const A& a, const std::vector<child_pos>& path) {
    detail::node_base* n = root(a);
    for (auto p : path) {
      if (n == nullptr || n->is_leaf) return nullptr;
      n = static_cast<detail::inner_node*>(n)->slot(p).load(std::memory_order_acquire);
    }
    return n == nullptr || n->is_leaf ? nullptr : static_cast<detail::inner_node*>(n);
  }

  /// Sets a child bit in the root without creating the child.
  template <class A>
  static void inject_dangling_bit(A& a, child_pos p) noexcept {
    root(a)->summary.fetch_or(a.fan_.child_mask(p), std::memory_order_acq_rel);
  }

  /// Clears a child bit in the root, leaving the child attached.
  template <class A>
  static void inject_cleared_bit(A& a, child_pos p) noexcept {
    root(a)->summary.fetch_and(~a.fan_.child_mask(p), std::memory_order_acq_rel);
  }

  /// Runs the post-delete residue clean-up for key against the current tree.
  template <class A>
  static void delete_clean(A& a, key_type key) {
    epoch::guard g;
    a.delete_clean(key, params(a));
  }

  template <class A>
  static void top_trim(A& a) {
    epoch::guard g;
    a.top_trim();
  }
};

}  // namespace dcveb

#endif  // DCVEB_HARNESS_DEBUG_ACCESS_HPP
