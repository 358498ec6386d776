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

#ifndef DCVEB_DCVEB_ARRAY_HPP
#define DCVEB_DCVEB_ARRAY_HPP

/// \file
/// Concurrent dynamic van Emde Boas array.
///
/// A fixed-fanout tree of array holders indexed by the base-n digits of the
/// key. Internal nodes carry a one-word occupancy summary. The published
/// {size, height, root} record is swapped atomically when the tree grows at
/// the top or is trimmed back.
///
/// Locking discipline:
///  - insert: global parameter lock in shared mode around the root pick-up,
///    then hand-over-hand shared node locks down one path.
///  - erase: exclusive locks on one (parent, child) pair at a time, bottom-up.
///    The global parameter lock is taken exclusively only while trimming.
///  - get / successor / predecessor / minimum / maximum: no locks.
///
/// Every leaf write is bracketed by a pair of global counters. The range
/// queries read them around their scan and rescan when a leaf write
/// overlapped, up to query_attempts times; the last scan is returned as is.
///
/// Nodes unlinked by erase or trim are retired to the epoch domain, so
/// lock-free readers never touch freed memory.

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>

#include "dcveb/epoch.hpp"
#include "dcveb/fair_rw_lock.hpp"
#include "dcveb/index_math.hpp"

namespace dcveb {

template <class T>
struct entry {
  key_type key;
  T value;

  friend bool operator==(const entry&, const entry&) = default;
};

enum class op_kind { insert, erase, get, successor, predecessor, minimum, maximum };

[[nodiscard]] inline const char* to_string(op_kind k) noexcept {
  switch (k) {
    case op_kind::insert: return "insert";
    case op_kind::erase: return "erase";
    case op_kind::get: return "get";
    case op_kind::successor: return "successor";
    case op_kind::predecessor: return "predecessor";
    case op_kind::minimum: return "minimum";
    case op_kind::maximum: return "maximum";
  }
  return "?";
}

/// Hook policy that does nothing. Test builds substitute a policy with the
/// same member functions to pause threads at the named points.
struct no_hooks {
  void after_snapshot(op_kind) noexcept {}
  void before_publish(op_kind) noexcept {}
  void before_trim_lock() noexcept {}
  void after_del_intern() noexcept {}
  void step(op_kind) noexcept {}
};

struct capacity_info {
  key_type size;
  unsigned height;

  friend bool operator==(const capacity_info&, const capacity_info&) = default;
};

struct debug_access;

namespace detail {

struct node_base {
  explicit node_base(bool leaf) noexcept : is_leaf{leaf} {}
  fair_rw_lock lock;
  const bool is_leaf;
};

template <class T>
struct leaf_node : node_base {
  leaf_node() noexcept : node_base{true} {}
  ~leaf_node() { delete value.load(std::memory_order_relaxed); }
  leaf_node(const leaf_node&) = delete;
  leaf_node& operator=(const leaf_node&) = delete;

  std::atomic<const T*> value{nullptr};
  std::atomic<std::int64_t> index{-1};
};

struct inner_node : node_base {
  explicit inner_node(unsigned n)
      : node_base{false},
        width{n},
        slots{new std::atomic<node_base*>[n] {}} {}

  std::atomic<node_base*>& slot(child_pos p) noexcept { return slots[p]; }

  std::atomic<summary_word> summary{0};
  std::atomic<bool> detached{false};
  const unsigned width;
  std::unique_ptr<std::atomic<node_base*>[]> slots;
};

struct array_param {
  key_type size;  // saturates at the key word maximum
  unsigned height;
  inner_node* root;
};

inline constexpr unsigned max_height = 64;

}  // namespace detail

/// Concurrent ordered map from 63-bit unsigned keys to copies of T.
template <class T, class Hooks = no_hooks>
class dcveb_array {
  static_assert(std::is_copy_constructible_v<T>);

 public:
  using value_type = T;
  using entry_type = entry<T>;

  /// \param n branching factor, power of two in [2, 64].
  /// \param max_rep bound on clean-up passes after a delete raced a grow.
  ///        Defaults to the height needed for the largest key.
  explicit dcveb_array(unsigned n = 64, std::optional<unsigned> max_rep = {},
                       Hooks hooks = {})
      : fan_{n},
        max_rep_{max_rep.value_or(fan_.required_height(max_key))},
        hooks_{std::move(hooks)} {
    if (max_rep_ < fan_.required_height(max_key))
      throw std::invalid_argument(
          "max_rep must be at least " +
          std::to_string(fan_.required_height(max_key)) + " for n=" +
          std::to_string(n));
    ap_.store(new detail::array_param{fan_.saturated_capacity(1), 1,
                                      new detail::inner_node{n}},
              std::memory_order_release);
  }

  dcveb_array(const dcveb_array&) = delete;
  dcveb_array& operator=(const dcveb_array&) = delete;

  ~dcveb_array() {
    auto* ap = ap_.load(std::memory_order_acquire);
    destroy_subtree(ap->root);
    delete ap;
  }

  [[nodiscard]] const fanout& branching() const noexcept { return fan_; }
  [[nodiscard]] unsigned max_rep() const noexcept { return max_rep_; }
  [[nodiscard]] Hooks& hooks() noexcept { return hooks_; }

  [[nodiscard]] capacity_info capacity_snapshot() const noexcept {
    epoch::guard g;
    const auto* ap = ap_.load(std::memory_order_acquire);
    return {ap->size, ap->height};
  }

  void insert(key_type key, T value) {
    if (key > max_key)
      throw std::out_of_range("key " + std::to_string(key) +
                              " exceeds the 63-bit key domain");
    if constexpr (requires(const T& v) { v == nullptr; }) {
      if (value == nullptr)
        throw std::invalid_argument("null payloads are not storable");
    }
    auto box = std::make_unique<const T>(std::move(value));

    epoch::guard g;
    bool grew_over_empty = false;
    auto* ap = acquire_root();
    while (!fan_.fits(key, ap->height)) {
      auto* old_root = ap->root;
      const bool was_empty =
          old_root->summary.load(std::memory_order_acquire) == 0;
      auto* grown = grow(key, ap);
      grown->root->lock.lock_shared();
      hooks_.before_publish(op_kind::insert);
      auto* expected = ap;
      if (ap_.compare_exchange_strong(expected, grown,
                                      std::memory_order_acq_rel)) {
        old_root->lock.unlock_shared();
        epoch::retire(ap);
        ap = grown;
        grew_over_empty = grew_over_empty || was_empty;
      } else {
        grown->root->lock.unlock_shared();
        old_root->lock.unlock_shared();
        discard_chain(grown, old_root);
        ap = acquire_root();
      }
    }

    descend_and_store(key, ap, box.release());
    if (grew_over_empty) {
      // The chain built above an empty root leaves child 0 flagged over an
      // empty subtree.
      delete_clean(0, ap_.load(std::memory_order_acquire));
    }
  }

  void erase(key_type key) {
    for (;;) {
      epoch::guard g;
      auto* ap = ap_.load(std::memory_order_acquire);
      hooks_.after_snapshot(op_kind::erase);
      if (key > max_key || !fan_.fits(key, ap->height)) return;

      trail t;
      make_path(key, ap, t);
      if (t.reached < ap->height) return;

      switch (del_intern(ap, t)) {
        case removal::restart: continue;
        case removal::absent: return;
        case removal::removed: break;
      }

      hooks_.after_del_intern();
      unsigned rep = 0;
      for (auto* now = ap_.load(std::memory_order_acquire);
           now != ap && rep < max_rep_;
           now = ap_.load(std::memory_order_acquire)) {
        ap = now;
        delete_clean(key, ap);
        ++rep;
      }
      top_trim();
      return;
    }
  }

  [[nodiscard]] std::optional<entry_type> get(key_type key) const {
    epoch::guard g;
    const auto* ap = ap_.load(std::memory_order_acquire);
    hooks_.after_snapshot(op_kind::get);
    if (!fan_.fits(key, ap->height)) return std::nullopt;
    detail::inner_node* node = ap->root;
    for (unsigned level = 0;; ++level) {
      hooks_.step(op_kind::get);
      const auto p = fan_.level_position(key, ap->height, level);
      if (!fan_.test_child(node->summary.load(std::memory_order_acquire), p))
        return std::nullopt;
      auto* child = node->slot(p).load(std::memory_order_acquire);
      if (child == nullptr) return std::nullopt;
      if (level + 1 == ap->height) return read_leaf(as_leaf(child));
      node = as_inner(child);
    }
  }

  /// Entry with the smallest key >= key.
  [[nodiscard]] std::optional<entry_type> successor(key_type key) const {
    return validated(op_kind::successor,
                     [&](const param* ap) { return successor_in(key, ap, op_kind::successor); });
  }

  /// Entry with the largest key <= key.
  [[nodiscard]] std::optional<entry_type> predecessor(key_type key) const {
    return validated(op_kind::predecessor, [&](const param* ap) {
      return predecessor_in(key, ap, op_kind::predecessor);
    });
  }

  [[nodiscard]] std::optional<entry_type> minimum() const {
    return validated(op_kind::minimum,
                     [&](const param* ap) { return successor_in(0, ap, op_kind::minimum); });
  }

  [[nodiscard]] std::optional<entry_type> maximum() const {
    return validated(op_kind::maximum, [&](const param* ap) {
      return predecessor_in(ap->size - 1, ap, op_kind::maximum);
    });
  }

  /// Scans a range query makes before giving up on a write-free window.
  static constexpr unsigned query_attempts = 16;

 private:
  friend struct debug_access;

  using inner = detail::inner_node;
  using leaf = detail::leaf_node<T>;
  using param = detail::array_param;

  enum class removal { removed, absent, restart };

  struct trail {
    std::array<inner*, detail::max_height> nodes{};
    std::array<child_pos, detail::max_height> pos{};
    leaf* leaf_node = nullptr;
    unsigned reached = 0;
  };

  static inner* as_inner(detail::node_base* n) noexcept {
    return static_cast<inner*>(n);
  }
  static leaf* as_leaf(detail::node_base* n) noexcept {
    return static_cast<leaf*>(n);
  }

  static std::optional<entry_type> read_leaf(const leaf* l) {
    const T* v = l->value.load(std::memory_order_acquire);
    if (v == nullptr) return std::nullopt;
    const auto idx = l->index.load(std::memory_order_acquire);
    if (idx < 0) return std::nullopt;
    return entry_type{static_cast<key_type>(idx), *v};
  }

  static bool subtree_empty(detail::node_base* n) noexcept {
    if (n->is_leaf)
      return as_leaf(n)->value.load(std::memory_order_acquire) == nullptr;
    return as_inner(n)->summary.load(std::memory_order_acquire) == 0;
  }

  static void destroy_subtree(detail::node_base* n) noexcept {
    if (n->is_leaf) {
      delete as_leaf(n);
      return;
    }
    auto* in = as_inner(n);
    for (child_pos q = 0; q < in->width; ++q)
      if (auto* c = in->slot(q).load(std::memory_order_relaxed)) destroy_subtree(c);
    delete in;
  }

  static void destroy_except_slot0(inner* in) noexcept {
    for (child_pos q = 1; q < in->width; ++q)
      if (auto* c = in->slot(q).load(std::memory_order_relaxed)) destroy_subtree(c);
    delete in;
  }

  static void retire_subtree(detail::node_base* n) {
    epoch::retire(n, [](void* p) noexcept {
      destroy_subtree(static_cast<detail::node_base*>(p));
    });
  }

  // Returns the published parameters with their root read-locked. The
  // snapshot is re-validated after locking: a grow that slipped in between
  // may already have had its chain cleaned away from under this root.
  param* acquire_root() {
    for (;;) {
      ap_lock_.lock_shared();
      auto* ap = ap_.load(std::memory_order_acquire);
      hooks_.after_snapshot(op_kind::insert);
      ap->root->lock.lock_shared();
      ap_lock_.unlock_shared();
      if (ap_.load(std::memory_order_acquire) == ap) return ap;
      ap->root->lock.unlock_shared();
    }
  }

  // Builds an unpublished record whose root is a chain of fresh nodes, each
  // with only child 0, the deepest adopting the current root.
  param* grow(key_type key, const param* ap) {
    const unsigned height = fan_.required_height(key);
    DCVEB_CONTRACT(height > ap->height, "grow called for a key that fits");
    detail::node_base* below = ap->root;
    inner* top = nullptr;
    for (unsigned added = 0; added < height - ap->height; ++added) {
      top = new inner{fan_.width()};
      top->summary.store(fan_.child_mask(0), std::memory_order_relaxed);
      top->slot(0).store(below, std::memory_order_relaxed);
      below = top;
    }
    return new param{fan_.saturated_capacity(height), height, top};
  }

  static void discard_chain(param* grown, inner* adopted) noexcept {
    detail::node_base* n = grown->root;
    while (n != adopted) {
      auto* in = as_inner(n);
      n = in->slot(0).load(std::memory_order_relaxed);
      delete in;
    }
    delete grown;
  }

  void descend_and_store(key_type key, const param* ap, const T* box) {
    const unsigned h = ap->height;
    inner* node = ap->root;  // read-locked by the caller
    for (unsigned level = 0;; ++level) {
      hooks_.step(op_kind::insert);
      const auto p = fan_.level_position(key, h, level);
      atomic_set_child(node->summary, fan_.child_mask(p));
      auto* child = node->slot(p).load(std::memory_order_acquire);
      const bool at_leaf = level + 1 == h;
      if (child == nullptr) {
        detail::node_base* fresh =
            at_leaf ? static_cast<detail::node_base*>(new leaf)
                    : static_cast<detail::node_base*>(new inner{fan_.width()});
        if (node->slot(p).compare_exchange_strong(child, fresh,
                                                  std::memory_order_acq_rel)) {
          child = fresh;
        } else if (at_leaf) {
          delete as_leaf(fresh);
        } else {
          delete as_inner(fresh);
        }
      }
      if (at_leaf) {
        auto* l = as_leaf(child);
        writes_begun_.fetch_add(1, std::memory_order_seq_cst);
        const T* old = l->value.exchange(box, std::memory_order_acq_rel);
        l->index.store(static_cast<std::int64_t>(key), std::memory_order_release);
        writes_ended_.fetch_add(1, std::memory_order_seq_cst);
        if (old != nullptr) epoch::retire(const_cast<T*>(old));
        node->lock.unlock_shared();
        return;
      }
      child->lock.lock_shared();
      node->lock.unlock_shared();
      node = as_inner(child);
    }
  }

  void make_path(key_type key, const param* ap, trail& t) const {
    const unsigned h = ap->height;
    inner* node = ap->root;
    t.leaf_node = nullptr;
    for (unsigned level = 0; level < h; ++level) {
      const auto p = fan_.level_position(key, h, level);
      t.nodes[level] = node;
      t.pos[level] = p;
      t.reached = level;
      if (!fan_.test_child(node->summary.load(std::memory_order_acquire), p))
        return;
      auto* child = node->slot(p).load(std::memory_order_acquire);
      if (child == nullptr) return;
      if (level + 1 == h) {
        t.leaf_node = as_leaf(child);
        t.reached = h;
        return;
      }
      node = as_inner(child);
    }
  }

  // Unlinks every child of a node whose summary dropped to zero. Caller holds
  // the node's write lock.
  void null_children(inner* node) {
    for (child_pos q = 0; q < node->width; ++q) {
      auto* c = node->slot(q).exchange(nullptr, std::memory_order_acq_rel);
      if (c == nullptr) continue;
      if (!c->is_leaf) as_inner(c)->detached.store(true, std::memory_order_release);
      retire_subtree(c);
    }
  }

  removal del_intern(const param* ap, trail& t) {
    const unsigned h = ap->height;
    inner* parent = t.nodes[h - 1];
    const child_pos p = t.pos[h - 1];
    leaf* l = t.leaf_node;

    parent->lock.lock();
    l->lock.lock();
    if (parent->detached.load(std::memory_order_acquire) ||
        parent->slot(p).load(std::memory_order_acquire) != l) {
      l->lock.unlock();
      parent->lock.unlock();
      return removal::restart;
    }
    const T* v = l->value.load(std::memory_order_acquire);
    if (v == nullptr) {
      l->lock.unlock();
      parent->lock.unlock();
      return removal::absent;
    }
    writes_begun_.fetch_add(1, std::memory_order_seq_cst);
    l->value.store(nullptr, std::memory_order_release);
    l->index.store(-1, std::memory_order_release);
    writes_ended_.fetch_add(1, std::memory_order_seq_cst);
    epoch::retire(const_cast<T*>(v));
    const auto remaining =
        parent->summary.fetch_and(~fan_.child_mask(p), std::memory_order_acq_rel) &
        ~fan_.child_mask(p);
    if (remaining == 0) null_children(parent);
    l->lock.unlock();
    parent->lock.unlock();

    if (remaining == 0 && h >= 2) propagate_up(t, h, h - 2);
    return removal::removed;
  }

  // Clears the bit for an empty child at each level from `from` up to the
  // root, stopping at the first level that stays occupied or is unchanged.
  void propagate_up(const trail& t, unsigned h, unsigned from) {
    for (unsigned level = from + 1; level-- > 0;) {
      inner* parent = t.nodes[level];
      detail::node_base* child =
          level + 1 == h ? static_cast<detail::node_base*>(t.leaf_node)
                         : t.nodes[level + 1];
      const child_pos p = t.pos[level];

      parent->lock.lock();
      child->lock.lock();
      bool altered = false;
      if (!parent->detached.load(std::memory_order_acquire) &&
          parent->slot(p).load(std::memory_order_acquire) == child &&
          subtree_empty(child) &&
          fan_.test_child(parent->summary.load(std::memory_order_acquire), p)) {
        parent->summary.fetch_and(~fan_.child_mask(p), std::memory_order_acq_rel);
        altered = true;
        if (parent->summary.load(std::memory_order_acquire) == 0)
          null_children(parent);
      }
      const bool occupied = parent->summary.load(std::memory_order_acquire) != 0;
      child->lock.unlock();
      parent->lock.unlock();
      if (!altered || occupied) return;
    }
  }

  // Removes residue on the path toward key in the given tree: bits that
  // lead only to empty subtrees. Never touches a present element.
  void delete_clean(key_type key, const param* ap) {
    if (!fan_.fits(key, ap->height)) return;
    trail t;
    make_path(key, ap, t);
    const unsigned h = ap->height;
    if (t.reached == h) {
      propagate_up(t, h, h - 1);
    } else if (t.reached > 0) {
      propagate_up(t, h, t.reached - 1);
    }
  }

  void top_trim() {
    for (;;) {
      auto* ap = ap_.load(std::memory_order_acquire);
      if (ap->height == 1) return;
      inner* root = ap->root;
      if (!fan_.is_only_child_zero(root->summary.load(std::memory_order_acquire)))
        return;
      if (root->slot(0).load(std::memory_order_acquire) == nullptr) return;

      hooks_.before_trim_lock();
      ap_lock_.lock();
      root->lock.lock();
      param* trimmed = nullptr;
      if (ap_.load(std::memory_order_acquire) == ap &&
          fan_.is_only_child_zero(root->summary.load(std::memory_order_acquire))) {
        // Re-read under the lock: a deleter may have emptied and unlinked
        // the lonely child since the unlocked check.
        if (auto* lonely = root->slot(0).load(std::memory_order_acquire)) {
          trimmed = new param{fan_.saturated_capacity(ap->height - 1),
                              ap->height - 1, as_inner(lonely)};
          hooks_.before_publish(op_kind::erase);
          auto* expected = ap;
          if (ap_.compare_exchange_strong(expected, trimmed,
                                          std::memory_order_acq_rel)) {
            root->detached.store(true, std::memory_order_release);
          } else {
            delete trimmed;
            trimmed = nullptr;
          }
        }
      }
      root->lock.unlock();
      ap_lock_.unlock();
      if (trimmed == nullptr) return;

      epoch::retire(ap);
      epoch::retire(root, [](void* p) noexcept {
        destroy_except_slot0(static_cast<inner*>(p));
      });
    }
  }

  // Runs scan until one pass starts with no leaf write in flight and ends
  // before another one starts. Such a pass saw one fixed set of entries.
  template <class Scan>
  std::optional<entry_type> validated(op_kind kind, Scan scan) const {
    epoch::guard g;
    for (unsigned attempt = 1;; ++attempt) {
      const auto begun = writes_begun_.load(std::memory_order_seq_cst);
      const bool quiet = writes_ended_.load(std::memory_order_seq_cst) == begun;
      const auto* ap = ap_.load(std::memory_order_acquire);
      hooks_.after_snapshot(kind);
      auto result = scan(ap);
      std::atomic_thread_fence(std::memory_order_seq_cst);
      if (quiet && writes_begun_.load(std::memory_order_seq_cst) == begun) return result;
      if (attempt == query_attempts) return result;
      std::this_thread::yield();
    }
  }

  std::optional<entry_type> successor_in(key_type key, const param* ap,
                                         op_kind kind) const {
    const unsigned h = ap->height;
    if (ap->root->summary.load(std::memory_order_acquire) == 0) return std::nullopt;
    if (!fan_.fits(key, h)) return std::nullopt;

    trail t;
    make_path(key, ap, t);
    unsigned level = t.reached;
    if (t.reached == h) {
      if (auto e = read_leaf(t.leaf_node)) return e;
      level = h - 1;
    }

    // Ascend until a level has an occupied child right of the trail, then
    // take the leftmost path down. A child vanishing mid-descent resumes the
    // search at that level, right of the vanished child.
    for (;;) {
      hooks_.step(kind);
      std::optional<child_pos> q;
      for (;;) {
        q = fan_.min_child_above(t.nodes[level]->summary.load(std::memory_order_acquire),
                                 t.pos[level]);
        if (q) break;
        if (level == 0) return std::nullopt;
        --level;
      }
      for (;;) {
        t.pos[level] = *q;
        auto* child = t.nodes[level]->slot(*q).load(std::memory_order_acquire);
        if (child == nullptr) break;
        if (level + 1 == h) {
          if (auto e = read_leaf(as_leaf(child))) return e;
          break;
        }
        auto* in = as_inner(child);
        q = fan_.min_child_above(in->summary.load(std::memory_order_acquire),
                                 before_first);
        if (!q) break;
        ++level;
        t.nodes[level] = in;
      }
    }
  }

  std::optional<entry_type> predecessor_in(key_type key, const param* ap,
                                           op_kind kind) const {
    const unsigned h = ap->height;
    if (ap->root->summary.load(std::memory_order_acquire) == 0) return std::nullopt;
    if (key > max_key) key = max_key;
    if (!fan_.fits(key, h)) key = ap->size - 1;

    trail t;
    make_path(key, ap, t);
    unsigned level = t.reached;
    if (t.reached == h) {
      if (auto e = read_leaf(t.leaf_node)) return e;
      level = h - 1;
    }

    for (;;) {
      hooks_.step(kind);
      std::optional<child_pos> q;
      for (;;) {
        q = fan_.max_child_below(t.nodes[level]->summary.load(std::memory_order_acquire),
                                 t.pos[level]);
        if (q) break;
        if (level == 0) return std::nullopt;
        --level;
      }
      for (;;) {
        t.pos[level] = *q;
        auto* child = t.nodes[level]->slot(*q).load(std::memory_order_acquire);
        if (child == nullptr) break;
        if (level + 1 == h) {
          if (auto e = read_leaf(as_leaf(child))) return e;
          break;
        }
        auto* in = as_inner(child);
        q = fan_.max_child_below(in->summary.load(std::memory_order_acquire),
                                 after_last);
        if (!q) break;
        ++level;
        t.nodes[level] = in;
      }
    }
  }

  const fanout fan_;
  const unsigned max_rep_;
  [[no_unique_address]] mutable Hooks hooks_;
  std::atomic<param*> ap_{nullptr};
  fair_rw_lock ap_lock_;
  alignas(64) std::atomic<std::uint64_t> writes_begun_{0};
  alignas(64) std::atomic<std::uint64_t> writes_ended_{0};
};

}  // namespace dcveb

#endif  // DCVEB_DCVEB_ARRAY_HPP
