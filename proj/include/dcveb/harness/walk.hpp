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

#ifndef DCVEB_HARNESS_WALK_HPP
#define DCVEB_HARNESS_WALK_HPP

/// \file
/// Quiescent structural verification. Call only while no thread mutates the
/// array.

#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dcveb/harness/debug_access.hpp"

namespace dcveb {

struct violation {
  std::string path;  // child positions from the root, e.g. "/2/0"
  std::string invariant;

  friend bool operator==(const violation&, const violation&) = default;
};

struct walk_report {
  std::uint64_t element_count = 0;
  std::uint64_t internal_node_count = 0;
  std::uint64_t leaf_node_count = 0;
  std::vector<violation> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }

  friend bool operator==(const walk_report&, const walk_report&) = default;
};

/// (n^h - 1) / (n - 1), saturating.
[[nodiscard]] inline std::uint64_t internal_node_bound(unsigned n, unsigned h) {
  constexpr auto top = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (unsigned k = 0; k < h; ++k) {
    if (total > top - level) return top;
    total += level;
    if (k + 1 < h && level > top / n) return top;
    level *= n;
  }
  return total;
}

namespace detail {

template <class T>
struct walker {
  const fanout& fan;
  unsigned height;
  walk_report& report;
  std::vector<key_type>& keys;

  static std::string path_string(const std::vector<child_pos>& path) {
    if (path.empty()) return "/";
    std::string s;
    for (auto p : path) s += "/" + std::to_string(p);
    return s;
  }

  void flag(const std::vector<child_pos>& path, const char* invariant) {
    report.violations.push_back({path_string(path), invariant});
  }

  // Returns the number of elements below the node.
  std::uint64_t visit_leaf(const leaf_node<T>* l, key_type key,
                           const std::vector<child_pos>& path) {
    ++report.leaf_node_count;
    const bool has_value = l->value.load(std::memory_order_acquire) != nullptr;
    const auto idx = l->index.load(std::memory_order_acquire);
    if (has_value != (idx != -1)) flag(path, "leaf-value-index-agreement");
    if (idx != -1 && static_cast<key_type>(idx) != key) flag(path, "leaf-index-matches-path");
    if (!has_value) return 0;
    keys.push_back(key);
    return 1;
  }

  std::uint64_t visit_inner(inner_node* node, unsigned level, key_type prefix,
                            std::vector<child_pos>& path) {
    ++report.internal_node_count;
    if (node->detached.load(std::memory_order_acquire)) flag(path, "reachable-node-detached");
    const auto s = node->summary.load(std::memory_order_acquire);
    if ((s & ~fan.full_mask()) != 0) flag(path, "summary-width");
    std::uint64_t total = 0;
    for (child_pos q = 0; q < fan.width(); ++q) {
      auto* child = node->slot(q).load(std::memory_order_acquire);
      const bool bit = fan.test_child(s, q);
      path.push_back(q);
      if (child == nullptr) {
        if (bit) flag(path, "bit-set-child-null");
        path.pop_back();
        continue;
      }
      const key_type key = prefix * fan.width() + q;
      const std::uint64_t below =
          level + 1 == height
              ? visit_leaf(static_cast<leaf_node<T>*>(child), key, path)
              : visit_inner(static_cast<inner_node*>(child), level + 1, key, path);
      if (bit && below == 0) flag(path, "bit-set-subtree-empty");
      if (!bit && below != 0) flag(path, "bit-clear-subtree-occupied");
      total += below;
      path.pop_back();
    }
    return total;
  }
};

}  // namespace detail

/// Full recursive check of the quiescent node invariants, the internal node
/// bound and agreement between reachable leaves and the successor chain.
template <class T, class H>
walk_report quiescent_walk(const dcveb_array<T, H>& a) {
  epoch::guard g;
  walk_report report;
  const auto* ap = debug_access::params(a);
  const auto& fan = a.branching();

  if (ap->height < 1) report.violations.push_back({"/", "height-at-least-one"});
  if (ap->size != fan.saturated_capacity(ap->height))
    report.violations.push_back({"/", "size-equals-capacity"});

  std::vector<key_type> keys;
  std::vector<child_pos> path;
  detail::walker<T> w{fan, ap->height, report, keys};
  report.element_count = w.visit_inner(ap->root, 0, 0, path);

  if (report.internal_node_count > internal_node_bound(fan.width(), ap->height))
    report.violations.push_back({"/", "internal-node-bound"});

  std::vector<key_type> chain;
  for (auto e = a.successor(0); e; e = a.successor(e->key + 1)) {
    if (!chain.empty() && e->key <= chain.back()) {
      report.violations.push_back({"/", "successor-chain-increasing"});
      break;
    }
    chain.push_back(e->key);
    if (e->key == max_key) break;
  }
  if (chain != keys) report.violations.push_back({"/", "successor-chain-equals-leaves"});
  return report;
}

/// Text rendering of every reachable node, for byte-for-byte comparisons.
template <class T, class H>
std::string structure_dump(const dcveb_array<T, H>& a) {
  epoch::guard g;
  const auto* ap = debug_access::params(a);
  const auto& fan = a.branching();
  std::ostringstream out;
  out << "size=" << ap->size << " height=" << ap->height << '\n';

  struct frame {
    detail::node_base* node;
    unsigned level;
    std::string path;
  };
  std::vector<frame> stack{{ap->root, 0, "/"}};
  while (!stack.empty()) {
    auto [node, level, path] = stack.back();
    stack.pop_back();
    if (node->is_leaf) {
      auto* l = static_cast<detail::leaf_node<T>*>(node);
      out << path << " leaf index=" << l->index.load() << " value="
          << (l->value.load() ? "set" : "nil") << '\n';
      continue;
    }
    auto* in = static_cast<detail::inner_node*>(node);
    out << path << " inner summary=" << std::hex << in->summary.load() << std::dec
        << '\n';
    for (child_pos q = fan.width(); q-- > 0;) {
      if (auto* c = in->slot(q).load())
        stack.push_back({c, level + 1, path + std::to_string(q) + "/"});
    }
  }
  return out.str();
}

}  // namespace dcveb

#endif  // DCVEB_HARNESS_WALK_HPP
