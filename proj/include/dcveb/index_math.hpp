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

#ifndef DCVEB_INDEX_MATH_HPP
#define DCVEB_INDEX_MATH_HPP

/// \file
/// Summary bit-vector arithmetic and key/level-position decomposition.
///
/// A summary is one machine word holding an n-bit occupancy vector. Child
/// position p maps to bit (n - 1 - p) counted from the least significant bit,
/// so child 0 is the most significant of the n bits and the "leftmost set bit"
/// is the smallest occupied child.

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef DCVEB_DISABLE_CONTRACTS
#define DCVEB_CONTRACT(cond, msg) ((void)0)
#else
#define DCVEB_CONTRACT(cond, msg)                                        \
  ((cond) ? (void)0                                                      \
          : ::dcveb::detail::contract_violation(#cond, msg, __FILE__, \
                                                __LINE__))
#endif

namespace dcveb {

using key_type = std::uint64_t;
using summary_word = std::uint64_t;
using child_pos = unsigned;

/// Largest storable key. Leaves keep the key in a signed slot where -1 marks
/// a vacancy, so the key domain is 63 bits wide.
inline constexpr key_type max_key =
    static_cast<key_type>(std::numeric_limits<std::int64_t>::max());

/// Lower-bound sentinel for min_child_above: "no lower bound".
struct before_first_t {
  explicit constexpr before_first_t() = default;
};
inline constexpr before_first_t before_first{};

/// Upper-bound sentinel for max_child_below: "no upper bound".
struct after_last_t {
  explicit constexpr after_last_t() = default;
};
inline constexpr after_last_t after_last{};

enum class set_result { was_already_set, did_set };

namespace detail {

[[noreturn]] inline void contract_violation(const char* cond, const char* msg,
                                            const char* file, int line) {
  std::fprintf(stderr, "dcveb contract violation: %s (%s) at %s:%d\n", msg,
               cond, file, line);
  std::abort();
}

}  // namespace detail

/// Base-n digits of a key for a tree of a given height, most significant
/// first. digits[k] is the child position taken at tree level k.
struct key_digits {
  key_type key{};
  unsigned height{};
  std::vector<child_pos> digits;

  [[nodiscard]] key_type reconstruct(unsigned branching) const noexcept {
    key_type result = 0;
    for (const auto d : digits) result = result * branching + d;
    return result;
  }
};

/// Branching factor of a tree together with all arithmetic that depends on
/// it. Value type; cheap to copy.
class fanout {
 public:
  static constexpr unsigned max_width = std::numeric_limits<summary_word>::digits;

  explicit constexpr fanout(unsigned n = 64) : width_{n}, shift_{0} {
    if (n < 2 || n > max_width || !std::has_single_bit(n))
      throw std::invalid_argument(
          "branching factor must be a power of two in [2, 64], got " +
          std::to_string(n));
    shift_ = static_cast<unsigned>(std::countr_zero(n));
  }

  [[nodiscard]] constexpr unsigned width() const noexcept { return width_; }
  [[nodiscard]] constexpr unsigned bits_per_level() const noexcept {
    return shift_;
  }

  [[nodiscard]] constexpr summary_word full_mask() const noexcept {
    return width_ == max_width ? ~summary_word{0}
                               : (summary_word{1} << width_) - 1;
  }

  [[nodiscard]] constexpr summary_word child_mask(child_pos p) const noexcept {
    DCVEB_CONTRACT(p < width_, "child position out of range");
    return summary_word{1} << (width_ - 1 - p);
  }

  [[nodiscard]] constexpr bool test_child(summary_word s,
                                          child_pos p) const noexcept {
    return (s & child_mask(p)) != 0;
  }

  [[nodiscard]] constexpr summary_word clear_child(summary_word s,
                                                   child_pos p) const noexcept {
    return s & ~child_mask(p);
  }

  [[nodiscard]] constexpr bool is_only_child_zero(
      summary_word s) const noexcept {
    return s == child_mask(0);
  }

  /// Smallest set child strictly greater than p.
  [[nodiscard]] constexpr std::optional<child_pos> min_child_above(
      summary_word s, child_pos p) const noexcept {
    DCVEB_CONTRACT(p < width_, "child position out of range");
    // children q > p live in bits [0, n - 1 - p)
    return leftmost(s & (child_mask(p) - 1));
  }

  [[nodiscard]] constexpr std::optional<child_pos> min_child_above(
      summary_word s, before_first_t) const noexcept {
    return leftmost(s & full_mask());
  }

  /// Largest set child strictly smaller than p.
  [[nodiscard]] constexpr std::optional<child_pos> max_child_below(
      summary_word s, child_pos p) const noexcept {
    DCVEB_CONTRACT(p < width_, "child position out of range");
    if (p == 0) return std::nullopt;
    // children q < p live in bits [n - p, n)
    const summary_word below_p = (summary_word{1} << (width_ - p)) - 1;
    return rightmost(s & full_mask() & ~below_p);
  }

  [[nodiscard]] constexpr std::optional<child_pos> max_child_below(
      summary_word s, after_last_t) const noexcept {
    return rightmost(s & full_mask());
  }

  /// True when key < n^height.
  [[nodiscard]] constexpr bool fits(key_type key,
                                    unsigned height) const noexcept {
    const auto bits = static_cast<std::uint64_t>(shift_) * height;
    return bits >= 64 || key < (key_type{1} << bits);
  }

  /// Child position of key at tree level `level` (0 = root).
  [[nodiscard]] constexpr child_pos level_position(
      key_type key, unsigned height, unsigned level) const noexcept {
    const unsigned below = shift_ * (height - 1 - level);
    if (below >= 64) return 0;
    return static_cast<child_pos>((key >> below) & (width_ - 1));
  }

  [[nodiscard]] key_digits digits(key_type key, unsigned height) const {
    if (height == 0) throw std::invalid_argument("height must be positive");
    if (!fits(key, height))
      throw std::out_of_range("key " + std::to_string(key) +
                              " does not fit a tree of height " +
                              std::to_string(height));
    key_digits result{key, height, {}};
    result.digits.reserve(height);
    for (unsigned level = 0; level < height; ++level)
      result.digits.push_back(level_position(key, height, level));
    return result;
  }

  /// Smallest h >= 1 with n^h > key.
  [[nodiscard]] constexpr unsigned required_height(
      key_type key) const noexcept {
    const auto significant = static_cast<unsigned>(std::bit_width(key));
    const unsigned h = (significant + shift_ - 1) / shift_;
    return h == 0 ? 1 : h;
  }

  /// n^height; throws std::overflow_error when it does not fit the key word.
  [[nodiscard]] constexpr key_type capacity(unsigned height) const {
    if (height == 0) throw std::invalid_argument("height must be positive");
    const auto bits = static_cast<std::uint64_t>(shift_) * height;
    if (bits >= 64)
      throw std::overflow_error("capacity n^" + std::to_string(height) +
                                " overflows the key word");
    return key_type{1} << bits;
  }

  /// n^height, clamped to the largest key word value.
  [[nodiscard]] constexpr key_type saturated_capacity(
      unsigned height) const noexcept {
    const auto bits = static_cast<std::uint64_t>(shift_) * height;
    return bits >= 64 ? std::numeric_limits<key_type>::max()
                      : key_type{1} << bits;
  }

  friend constexpr bool operator==(const fanout&, const fanout&) = default;

 private:
  [[nodiscard]] constexpr std::optional<child_pos> leftmost(
      summary_word s) const noexcept {
    if (s == 0) return std::nullopt;
    const auto bit = static_cast<unsigned>(std::bit_width(s) - 1);
    return width_ - 1 - bit;
  }

  [[nodiscard]] constexpr std::optional<child_pos> rightmost(
      summary_word s) const noexcept {
    if (s == 0) return std::nullopt;
    const auto bit = static_cast<unsigned>(std::countr_zero(s));
    return width_ - 1 - bit;
  }

  unsigned width_;
  unsigned shift_;
};

/// Sets one child bit with a read/CAS loop. Only sound while the caller
/// holds at least a read lock on the owning node: concurrent modifiers may
/// then only add bits, so the loop fails at most n times.
inline set_result atomic_set_child(std::atomic<summary_word>& cell,
                                   summary_word mask) noexcept {
  auto current = cell.load(std::memory_order_acquire);
  for (;;) {
    if ((current & mask) != 0) return set_result::was_already_set;
    if (cell.compare_exchange_strong(current, current | mask,
                                   std::memory_order_acq_rel,
                                   std::memory_order_acquire))
      return set_result::did_set;
  }
}

}  // namespace dcveb

#endif  // DCVEB_INDEX_MATH_HPP
