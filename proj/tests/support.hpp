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

// Independent oracles for tests. Deliberately naive: strings, division,
// repeated multiplication and full scans instead of the bit tricks the library
// uses.

#ifndef DCVEB_TESTS_SUPPORT_HPP
#define DCVEB_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dcveb/harness/linearizability.hpp"

namespace oracle {

// Summary rendered as n characters, child 0 first.
inline std::string render(std::uint64_t word, unsigned n) {
  std::string s(n, '0');
  for (unsigned i = 0; i < n; ++i)
    if ((word >> (n - 1 - i)) % 2 == 1) s[i] = '1';
  return s;
}

inline std::uint64_t parse(const std::string& s) {
  std::uint64_t w = 0;
  for (char c : s) w = w * 2 + (c == '1' ? 1 : 0);
  return w;
}

inline std::uint64_t mask(unsigned n, unsigned p) {
  std::string s(n, '0');
  s[p] = '1';
  return parse(s);
}

inline std::optional<unsigned> min_above(std::uint64_t word, unsigned n, std::optional<unsigned> p) {
  const auto s = render(word, n);
  for (unsigned q = p ? *p + 1 : 0; q < n; ++q)
    if (s[q] == '1') return q;
  return std::nullopt;
}

inline std::optional<unsigned> max_below(std::uint64_t word, unsigned n, std::optional<unsigned> p) {
  const auto s = render(word, n);
  for (unsigned q = p ? *p : n; q-- > 0;)
    if (s[q] == '1') return q;
  return std::nullopt;
}

inline std::vector<unsigned> digits(std::uint64_t key, unsigned n, unsigned h) {
  std::vector<unsigned> d(h, 0);
  for (unsigned k = h; k-- > 0;) {
    d[k] = static_cast<unsigned>(key % n);
    key /= n;
  }
  return d;
}

// n^h by repeated multiplication; nullopt when it leaves 64 bits.
inline std::optional<std::uint64_t> power(unsigned n, unsigned h) {
  std::uint64_t v = 1;
  for (unsigned i = 0; i < h; ++i) {
    if (v > UINT64_MAX / n) return std::nullopt;
    v *= n;
  }
  return v;
}

inline unsigned height_for(std::uint64_t key, unsigned n) {
  for (unsigned h = 1;; ++h) {
    auto cap = power(n, h);
    if (!cap || *cap > key) return h;
  }
}

// (n^h - 1) / (n - 1) as the sum of nodes per level of a full tree.
inline std::uint64_t full_tree_internal_nodes(unsigned n, unsigned h) {
  std::uint64_t total = 0;
  for (unsigned k = 0; k < h; ++k) total += *power(n, k);
  return total;
}

// Linearizability by trying every permutation of the calls.
template <class T>
bool naive_linearizable(const dcveb::history<T>& h) {
  const auto calls = dcveb::calls_of(h);
  std::vector<std::size_t> order(calls.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    bool ok = true;
    for (std::size_t a = 0; a < order.size() && ok; ++a)
      for (std::size_t b = a + 1; b < order.size() && ok; ++b)
        if (calls[order[b]].responded < calls[order[a]].invoked) ok = false;
    if (!ok) continue;
    std::set<std::pair<std::uint64_t, T>> s;  // sorted by key
    for (auto i : order) {
      const auto& c = calls[i];
      std::optional<dcveb::entry<T>> r;
      auto find_key = [&](std::uint64_t k) {
        return std::find_if(s.begin(), s.end(), [&](const auto& e) { return e.first == k; });
      };
      switch (c.op.code) {
        case dcveb::op_code::insert: {
          auto it = find_key(c.op.key);
          if (it != s.end()) s.erase(it);
          s.insert({c.op.key, c.op.value});
          break;
        }
        case dcveb::op_code::erase: {
          auto it = find_key(c.op.key);
          if (it != s.end()) s.erase(it);
          break;
        }
        case dcveb::op_code::get: {
          auto it = find_key(c.op.key);
          if (it != s.end()) r = dcveb::entry<T>{it->first, it->second};
          break;
        }
        case dcveb::op_code::successor:
          for (const auto& e : s)
            if (e.first >= c.op.key) {
              r = dcveb::entry<T>{e.first, e.second};
              break;
            }
          break;
        case dcveb::op_code::predecessor:
          for (const auto& e : s)
            if (e.first <= c.op.key) r = dcveb::entry<T>{e.first, e.second};
          break;
        case dcveb::op_code::minimum:
          if (!s.empty()) r = dcveb::entry<T>{s.begin()->first, s.begin()->second};
          break;
        case dcveb::op_code::maximum:
          if (!s.empty()) r = dcveb::entry<T>{s.rbegin()->first, s.rbegin()->second};
          break;
      }
      if (!(r == c.result)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

}  // namespace oracle

#endif  // DCVEB_TESTS_SUPPORT_HPP
