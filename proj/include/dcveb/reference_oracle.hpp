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

#ifndef DCVEB_REFERENCE_ORACLE_HPP
#define DCVEB_REFERENCE_ORACLE_HPP

/// \file
/// Sequential ordered map with the same query semantics as dcveb_array.
/// Ground truth for equivalence tests and the sequential specification used
/// by the linearizability checker.

#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "dcveb/dcveb_array.hpp"

namespace dcveb {

enum class op_code { insert, erase, get, successor, predecessor, minimum, maximum };

[[nodiscard]] inline const char* to_string(op_code c) noexcept {
  switch (c) {
    case op_code::insert: return "insert";
    case op_code::erase: return "erase";
    case op_code::get: return "get";
    case op_code::successor: return "successor";
    case op_code::predecessor: return "predecessor";
    case op_code::minimum: return "minimum";
    case op_code::maximum: return "maximum";
  }
  return "?";
}

template <class T>
struct operation {
  op_code code;
  key_type key{};
  T value{};

  friend bool operator==(const operation&, const operation&) = default;
};

/// Result of one operation. Mutators always yield nullopt.
template <class T>
using op_result = std::optional<entry<T>>;

template <class T>
class reference_oracle {
 public:
  using state_type = std::map<key_type, T>;

  reference_oracle() = default;
  explicit reference_oracle(state_type s) : entries_{std::move(s)} {}

  void insert(key_type key, T value) { entries_.insert_or_assign(key, std::move(value)); }
  void erase(key_type key) { entries_.erase(key); }

  [[nodiscard]] op_result<T> get(key_type key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? op_result<T>{} : wrap(it);
  }

  [[nodiscard]] op_result<T> successor(key_type key) const {
    auto it = entries_.lower_bound(key);
    return it == entries_.end() ? op_result<T>{} : wrap(it);
  }

  [[nodiscard]] op_result<T> predecessor(key_type key) const {
    auto it = entries_.upper_bound(key);
    return it == entries_.begin() ? op_result<T>{} : wrap(std::prev(it));
  }

  [[nodiscard]] op_result<T> minimum() const {
    return entries_.empty() ? op_result<T>{} : wrap(entries_.begin());
  }

  [[nodiscard]] op_result<T> maximum() const {
    return entries_.empty() ? op_result<T>{} : wrap(std::prev(entries_.end()));
  }

  op_result<T> apply(const operation<T>& op) {
    switch (op.code) {
      case op_code::insert: insert(op.key, op.value); return {};
      case op_code::erase: erase(op.key); return {};
      case op_code::get: return get(op.key);
      case op_code::successor: return successor(op.key);
      case op_code::predecessor: return predecessor(op.key);
      case op_code::minimum: return minimum();
      case op_code::maximum: return maximum();
    }
    return {};
  }

  [[nodiscard]] const state_type& state() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const reference_oracle&, const reference_oracle&) = default;

 private:
  static op_result<T> wrap(typename state_type::const_iterator it) {
    return entry<T>{it->first, it->second};
  }

  state_type entries_;
};

/// Pure form: returns the result together with the successor state.
template <class T>
[[nodiscard]] std::pair<op_result<T>, reference_oracle<T>> apply(
    const operation<T>& op, reference_oracle<T> state) {
  auto result = state.apply(op);
  return {std::move(result), std::move(state)};
}

/// Runs one operation against any structure exposing the public map API.
template <class Map, class T>
op_result<T> apply_to(Map& map, const operation<T>& op) {
  switch (op.code) {
    case op_code::insert: map.insert(op.key, op.value); return {};
    case op_code::erase: map.erase(op.key); return {};
    case op_code::get: return map.get(op.key);
    case op_code::successor: return map.successor(op.key);
    case op_code::predecessor: return map.predecessor(op.key);
    case op_code::minimum: return map.minimum();
    case op_code::maximum: return map.maximum();
  }
  return {};
}

}  // namespace dcveb

#endif  // DCVEB_REFERENCE_ORACLE_HPP
