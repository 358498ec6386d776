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

#ifndef DCVEB_FAIR_RW_LOCK_HPP
#define DCVEB_FAIR_RW_LOCK_HPP

#include <atomic>
#include <cstdint>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace dcveb {

/// Task-fair readers-writer ticket lock.
///
/// Every acquisition draws a ticket; requests are granted strictly in ticket
/// order, consecutive readers share the lock. Neither readers nor writers can
/// starve. Waiters spin briefly and then block on the ticket word.
///
/// Satisfies the SharedMutex named requirement (std::shared_lock works).
class fair_rw_lock {
 public:
  fair_rw_lock() noexcept = default;
  fair_rw_lock(const fair_rw_lock&) = delete;
  fair_rw_lock& operator=(const fair_rw_lock&) = delete;

  void lock() noexcept {
    const auto ticket = next_.fetch_add(1, std::memory_order_relaxed);
    await(write_turn_, ticket);
  }

  [[nodiscard]] bool try_lock() noexcept {
    auto ticket = write_turn_.load(std::memory_order_relaxed);
    // Free iff the next ticket to hand out is the one being served and no
    // reader is still draining.
    if (read_turn_.load(std::memory_order_relaxed) != ticket) return false;
    return next_.compare_exchange_strong(ticket, ticket + 1,
                                         std::memory_order_acquire,
                                         std::memory_order_relaxed);
  }

  void unlock() noexcept {
    // Exclusive owner: nobody else writes either turn counter right now.
    write_turn_.store(write_turn_.load(std::memory_order_relaxed) + 1,
                      std::memory_order_release);
    read_turn_.store(read_turn_.load(std::memory_order_relaxed) + 1,
                     std::memory_order_release);
    write_turn_.notify_all();
    read_turn_.notify_all();
  }

  void lock_shared() noexcept {
    const auto ticket = next_.fetch_add(1, std::memory_order_relaxed);
    await(read_turn_, ticket);
    read_turn_.fetch_add(1, std::memory_order_release);
    read_turn_.notify_all();
  }

  void unlock_shared() noexcept {
    write_turn_.fetch_add(1, std::memory_order_release);
    write_turn_.notify_all();
  }

 private:
  static void await(const std::atomic<std::uint32_t>& turn,
                    std::uint32_t ticket) noexcept {
    static const unsigned spin_limit =
        std::thread::hardware_concurrency() > 1 ? 64 : 0;
    unsigned spins = 0;
    for (;;) {
      const auto current = turn.load(std::memory_order_acquire);
      if (current == ticket) return;
      if (spins < spin_limit) {
        ++spins;
        cpu_relax();
      } else {
        turn.wait(current, std::memory_order_acquire);
      }
    }
  }

  static void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    _mm_pause();
#else
    std::this_thread::yield();
#endif
  }

  std::atomic<std::uint32_t> write_turn_{0};
  std::atomic<std::uint32_t> read_turn_{0};
  std::atomic<std::uint32_t> next_{0};
};

}  // namespace dcveb

#endif  // DCVEB_FAIR_RW_LOCK_HPP
