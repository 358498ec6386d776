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

#ifndef DCVEB_EPOCH_HPP
#define DCVEB_EPOCH_HPP

/// \file
/// Epoch-based deferred reclamation.
///
/// Threads read shared nodes only inside an epoch::guard. Unlinked objects are
/// handed to retire() and freed once every thread that could still hold a
/// reference has left its critical section.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <utility>
#include <vector>

namespace dcveb::epoch {

using deleter_fn = void (*)(void*) noexcept;

namespace detail {

struct retired {
  void* ptr;
  deleter_fn deleter;
  std::uint64_t epoch;
};

struct alignas(64) thread_record {
  std::atomic<std::uint64_t> local_epoch{0};
  std::atomic<bool> active{false};
  std::atomic<bool> in_use{false};
  thread_record* next{nullptr};
  // Owned by the thread holding the record.
  unsigned nesting{0};
  unsigned since_scan{0};
  std::vector<retired> limbo;
};

}  // namespace detail

class domain {
 public:
  /// Retires between reclamation attempts.
  static constexpr unsigned scan_interval = 64;

  static domain& instance() {
    static domain d;
    return d;
  }

  domain(const domain&) = delete;
  domain& operator=(const domain&) = delete;

  ~domain() {
    for (auto& r : orphans_) r.deleter(r.ptr);
    auto* rec = records_.load(std::memory_order_acquire);
    while (rec != nullptr) {
      for (auto& r : rec->limbo) r.deleter(r.ptr);
      auto* next = rec->next;
      delete rec;
      rec = next;
    }
  }

  [[nodiscard]] std::uint64_t global_epoch() const noexcept {
    return global_.load(std::memory_order_acquire);
  }

  void enter() {
    auto& rec = local();
    if (rec.nesting++ != 0) return;
    rec.active.store(true, std::memory_order_relaxed);
    auto observed = global_.load(std::memory_order_relaxed);
    for (;;) {
      rec.local_epoch.store(observed, std::memory_order_relaxed);
      // Publish activity before any shared pointer is loaded.
      std::atomic_thread_fence(std::memory_order_seq_cst);
      const auto now = global_.load(std::memory_order_relaxed);
      if (now == observed) break;
      observed = now;
    }
  }

  void leave() noexcept {
    auto& rec = local();
    if (--rec.nesting != 0) return;
    rec.active.store(false, std::memory_order_release);
  }

  void retire(void* ptr, deleter_fn deleter) {
    auto& rec = local();
    std::atomic_thread_fence(std::memory_order_seq_cst);
    rec.limbo.push_back({ptr, deleter, global_.load(std::memory_order_acquire)});
    if (++rec.since_scan >= scan_interval) {
      rec.since_scan = 0;
      try_advance();
      reclaim(rec);
    }
  }

  template <class T>
  void retire(T* ptr) {
    retire(ptr, [](void* p) noexcept { delete static_cast<T*>(p); });
  }

  /// Bumps the global epoch if every active thread has observed it.
  bool try_advance() noexcept {
    std::atomic_thread_fence(std::memory_order_seq_cst);
    auto current = global_.load(std::memory_order_acquire);
    for (auto* rec = records_.load(std::memory_order_acquire); rec != nullptr;
         rec = rec->next) {
      if (!rec->in_use.load(std::memory_order_acquire)) continue;
      if (rec->active.load(std::memory_order_acquire) &&
          rec->local_epoch.load(std::memory_order_acquire) != current)
        return false;
    }
    return global_.compare_exchange_strong(current, current + 1,
                                           std::memory_order_acq_rel);
  }

  /// Frees whatever the calling thread and exited threads left behind, as far
  /// as other threads allow. Intended for tests and shutdown paths; must not
  /// be called from inside a guard. Returns the number of objects still
  /// pending.
  std::size_t drain(unsigned max_rounds = 8) {
    auto& rec = local();
    for (unsigned round = 0; round < max_rounds; ++round) {
      try_advance();
      reclaim(rec);
      if (rec.limbo.empty() && orphan_count() == 0) break;
    }
    return rec.limbo.size() + orphan_count();
  }

  [[nodiscard]] std::size_t pending_local() { return local().limbo.size(); }

  [[nodiscard]] std::size_t orphan_count() {
    std::lock_guard lk{orphan_mutex_};
    return orphans_.size();
  }

 private:
  domain() = default;

  struct handle {
    detail::thread_record* rec{nullptr};
    ~handle() {
      if (rec == nullptr) return;
      auto& d = domain::instance();
      if (!rec->limbo.empty()) {
        std::lock_guard lk{d.orphan_mutex_};
        d.orphans_.insert(d.orphans_.end(), rec->limbo.begin(),
                          rec->limbo.end());
      }
      rec->limbo.clear();
      rec->nesting = 0;
      rec->since_scan = 0;
      rec->active.store(false, std::memory_order_relaxed);
      rec->in_use.store(false, std::memory_order_release);
    }
  };

  detail::thread_record& local() {
    thread_local handle h;
    if (h.rec == nullptr) h.rec = acquire_record();
    return *h.rec;
  }

  detail::thread_record* acquire_record() {
    for (auto* rec = records_.load(std::memory_order_acquire); rec != nullptr;
         rec = rec->next) {
      bool expected = false;
      if (!rec->in_use.load(std::memory_order_relaxed) &&
          rec->in_use.compare_exchange_strong(expected, true,
                                              std::memory_order_acq_rel))
        return rec;
    }
    auto* rec = new detail::thread_record;
    rec->in_use.store(true, std::memory_order_relaxed);
    auto* head = records_.load(std::memory_order_relaxed);
    do {
      rec->next = head;
    } while (!records_.compare_exchange_weak(head, rec,
                                             std::memory_order_acq_rel,
                                             std::memory_order_relaxed));
    return rec;
  }

  [[nodiscard]] bool safe(const detail::retired& r,
                          std::uint64_t current) const noexcept {
    return current >= r.epoch + 2;
  }

  void reclaim(detail::thread_record& rec) {
    const auto current = global_.load(std::memory_order_acquire);
    std::erase_if(rec.limbo, [&](const detail::retired& r) {
      if (!safe(r, current)) return false;
      r.deleter(r.ptr);
      return true;
    });

    std::vector<detail::retired> ready;
    {
      std::unique_lock lk{orphan_mutex_, std::try_to_lock};
      if (!lk.owns_lock() || orphans_.empty()) return;
      std::erase_if(orphans_, [&](const detail::retired& r) {
        if (!safe(r, current)) return false;
        ready.push_back(r);
        return true;
      });
    }
    for (auto& r : ready) r.deleter(r.ptr);
  }

  std::atomic<std::uint64_t> global_{2};
  std::atomic<detail::thread_record*> records_{nullptr};
  std::mutex orphan_mutex_;
  std::vector<detail::retired> orphans_;
};

/// RAII critical section. Nests.
class guard {
 public:
  guard() : d_{domain::instance()} { d_.enter(); }
  ~guard() { d_.leave(); }
  guard(const guard&) = delete;
  guard& operator=(const guard&) = delete;

 private:
  domain& d_;
};

template <class T>
void retire(T* ptr) {
  domain::instance().retire(ptr);
}

inline void retire(void* ptr, deleter_fn deleter) {
  domain::instance().retire(ptr, deleter);
}

}  // namespace dcveb::epoch

#endif  // DCVEB_EPOCH_HPP
