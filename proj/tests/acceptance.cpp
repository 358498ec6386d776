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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dcveb/bench/workload.hpp"
#include "dcveb/dcveb_array.hpp"
#include "dcveb/harness/linearizability.hpp"
#include "dcveb/harness/scenarios.hpp"
#include "dcveb/harness/stress.hpp"
#include "dcveb/harness/walk.hpp"
#include "dcveb/reference_oracle.hpp"
#include "support.hpp"
#include "violations.hpp"

namespace {

using dcveb::dcveb_array;
using dcveb::key_type;
using dcveb::op_code;
using clk = std::chrono::steady_clock;

struct verdict {
  bool pass;
  std::string detail;
};

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

verdict sequential_equivalence() {
  const auto t0 = clk::now();
  std::uint64_t mismatches = 0;
  for (unsigned n : {4u, 64u}) {
    std::mt19937_64 rng{n};
    dcveb_array<int> a{n};
    dcveb::reference_oracle<int> o;
    for (int i = 0; i < 100000; ++i) {
      const dcveb::operation<int> op{static_cast<op_code>(rng() % 7), rng() % 10000,
                                     static_cast<int>(rng() % 1000000)};
      if (!(dcveb::apply_to(a, op) == o.apply(op))) ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 30.0,
          fmt("2 x 100000 ops, key range 10000, n in {4,64}: %llu mismatches, %.2f s (limit 30 s)",
              static_cast<unsigned long long>(mismatches), s)};
}

verdict exhaustive_small_space() {
  // Alphabet: insert, erase, get, successor; keys 0..7; n = 2. Every sequence
  // of length 0..5 is replayed on a fresh array against an 8-slot table.
  const auto t0 = clk::now();
  constexpr unsigned choices = 4 * 8;
  std::uint64_t sequences = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t walk_failures = 0;
  for (unsigned len = 0; len <= 5; ++len) {
    std::uint64_t total = 1;
    for (unsigned i = 0; i < len; ++i) total *= choices;
    for (std::uint64_t code = 0; code < total; ++code) {
      dcveb_array<int> a{2};
      std::array<std::optional<int>, 8> table{};
      std::uint64_t c = code;
      for (unsigned step = 0; step < len; ++step, c /= choices) {
        const auto key = static_cast<key_type>(c % 8);
        const int value = static_cast<int>(step) + 1;
        std::optional<dcveb::entry<int>> expect, got;
        switch (c / 8 % 4) {
          case 0:
            a.insert(key, value);
            table[key] = value;
            break;
          case 1:
            a.erase(key);
            table[key].reset();
            break;
          case 2:
            got = a.get(key);
            if (table[key]) expect = dcveb::entry<int>{key, *table[key]};
            break;
          default:
            got = a.successor(key);
            for (key_type k = key; k < 8 && !expect; ++k)
              if (table[k]) expect = dcveb::entry<int>{k, *table[k]};
            break;
        }
        if (!(got == expect)) ++mismatches;
      }
      for (key_type k = 0; k < 8; ++k) {
        const auto got = a.get(k);
        if (got.has_value() != table[k].has_value() || (got && got->value != *table[k]))
          ++mismatches;
      }
      if (code % 4096 == 0 && !dcveb::quiescent_walk(a).ok()) ++walk_failures;
      ++sequences;
    }
  }
  return {mismatches == 0 && walk_failures == 0,
          fmt("%llu sequences: %llu mismatches, %llu walk failures on sampled finals, %.1f s",
              static_cast<unsigned long long>(sequences),
              static_cast<unsigned long long>(mismatches),
              static_cast<unsigned long long>(walk_failures), seconds_since(t0))};
}

verdict linearizability() {
  const auto t0 = clk::now();
  constexpr unsigned histories = 1000;
  unsigned accepted = 0;
  for (unsigned seed = 1; seed <= histories; ++seed) {
    dcveb::record_config cfg;
    cfg.threads = 3;
    cfg.ops_per_thread = 4;
    cfg.key_range = 8;
    cfg.seed = seed;
    const auto h = dcveb::record_history(cfg);
    if (dcveb::check_linearizable(h).linearizable) {
      ++accepted;
    } else {
      std::fprintf(stderr, "non-linearizable history (seed %u):\n%s", seed,
                   dcveb::dump(h).c_str());
    }
  }
  unsigned rejected = 0;
  const auto bad = fixtures::violating_histories();
  for (const auto& c : bad)
    if (!dcveb::check_linearizable(c.h).linearizable) ++rejected;
  const double s = seconds_since(t0);
  return {accepted == histories && rejected == bad.size() && bad.size() == 10 && s < 300.0,
          fmt("%u/%u recorded histories (3 threads x 4 ops, keys 0..7) accepted; %u/%zu "
              "violating histories rejected; %.1f s (limit 300 s)",
              accepted, histories, rejected, bad.size(), s)};
}

verdict successor_liveness() {
  constexpr key_type sentinel = 50;
  constexpr unsigned query_threads = 4;
  constexpr std::uint64_t queries_per_thread = 250000;
  dcveb_array<int> a{4};
  a.insert(sentinel, -1);

  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> nones{0};
  std::atomic<std::uint64_t> below_query{0};
  std::vector<std::thread> churn;
  for (unsigned t = 0; t < 4; ++t)
    churn.emplace_back([&, t] {
      std::mt19937_64 rng{100 + t};
      // Keys on both sides of the sentinel, so the tree also grows and trims.
      while (!stop.load(std::memory_order_relaxed)) {
        key_type k = rng() % 300;
        if (k == sentinel) continue;
        if (rng() % 2) a.insert(k, static_cast<int>(k));
        else a.erase(k);
      }
    });
  std::vector<std::thread> readers;
  for (unsigned t = 0; t < query_threads; ++t)
    readers.emplace_back([&, t] {
      std::mt19937_64 rng{200 + t};
      for (std::uint64_t i = 0; i < queries_per_thread; ++i) {
        const key_type q = rng() % (sentinel + 1);
        const auto r = a.successor(q);
        if (!r) nones.fetch_add(1, std::memory_order_relaxed);
        else if (r->key < q) below_query.fetch_add(1, std::memory_order_relaxed);
      }
    });
  for (auto& t : readers) t.join();
  stop = true;
  for (auto& t : churn) t.join();
  const bool walk_ok = dcveb::quiescent_walk(a).ok();
  const bool sentinel_ok = a.get(sentinel).has_value();
  return {nones == 0 && below_query == 0 && walk_ok && sentinel_ok,
          fmt("%llu successor queries at or below sentinel %llu under 4 churn threads: %llu NONE, "
              "%llu below query, walk %s",
              static_cast<unsigned long long>(query_threads * queries_per_thread),
              static_cast<unsigned long long>(sentinel),
              static_cast<unsigned long long>(nones.load()),
              static_cast<unsigned long long>(below_query.load()), walk_ok ? "clean" : "dirty")};
}

verdict growth_trim_arithmetic() {
  constexpr unsigned n = 64;
  dcveb_array<int> a{n};
  std::vector<std::string> problems;
  auto check_step = [&](const dcveb::capacity_info& before, const dcveb::capacity_info& after,
                        const char* what) {
    // C_new = C_old * n^k for growth by k levels; the inverse for a trim.
    const auto& big = after.height >= before.height ? after : before;
    const auto& small = after.height >= before.height ? before : after;
    const auto k = big.height - small.height;
    const auto factor = oracle::power(n, k);
    const auto product = factor && small.size <= UINT64_MAX / *factor
                             ? std::optional<std::uint64_t>{small.size * *factor}
                             : std::nullopt;
    if (!product || *product != big.size) problems.push_back(std::string{"capacity step "} + what);
  };

  const key_type big_key = (key_type{1} << 31) - 1;
  auto c0 = a.capacity_snapshot();
  a.insert(big_key, 1);
  auto c1 = a.capacity_snapshot();
  if (c1.height != 6) problems.push_back("height after insert(2^31-1) is " + std::to_string(c1.height));
  if (c1.height != oracle::height_for(big_key, n)) problems.push_back("height disagrees with oracle");
  check_step(c0, c1, "grow");

  a.insert(3, 2);
  auto c2 = a.capacity_snapshot();
  a.erase(big_key);
  auto c3 = a.capacity_snapshot();
  check_step(c2, c3, "delete back to one small key");
  a.insert(71, 3);
  auto c4 = a.capacity_snapshot();
  check_step(c3, c4, "cycle insert");
  a.erase(71);
  auto c5 = a.capacity_snapshot();
  check_step(c4, c5, "cycle delete");
  if (c5.height != 1 || c5.size != 64)
    problems.push_back("final height " + std::to_string(c5.height));
  if (!(a.get(3) == dcveb::entry<int>{3, 2})) problems.push_back("small key lost");

  // Randomized grow steps wherever 64^h still fits a word (h <= 10). At
  // h = 11 the capacity 2^66 is stored saturated instead.
  std::mt19937_64 rng{5};
  for (int i = 0; i < 200; ++i) {
    dcveb_array<int> b{n};
    b.insert(rng() % 64, 0);
    auto before = b.capacity_snapshot();
    const key_type k = (rng() >> 4) >> (rng() % 60);
    b.insert(k, 1);
    check_step(before, b.capacity_snapshot(), "random grow");
  }
  dcveb_array<int> top{n};
  top.insert(dcveb::max_key, 1);
  if (top.capacity_snapshot().height != 11 || top.capacity_snapshot().size != UINT64_MAX)
    problems.push_back("largest key does not saturate capacity at height 11");
  return {problems.empty(),
          problems.empty()
              ? fmt("height %u after insert(2^31-1); %u after deleting back to key 3; 1 after one "
                    "more delete cycle; every capacity step equals C_old*64^k",
                    c1.height, c3.height)
              : problems.front()};
}

verdict memory_bound() {
  dcveb_array<int> a{64};
  for (key_type k = 0; k < 4096; ++k) a.insert(k, 1);
  const auto r = dcveb::quiescent_walk(a);
  const auto expected = oracle::full_tree_internal_nodes(64, 2);
  return {r.ok() && expected == 65 && r.internal_node_count == expected,
          fmt("keys 0..4095 with n=64: %llu internal nodes (bound and exact value %llu)",
              static_cast<unsigned long long>(r.internal_node_count),
              static_cast<unsigned long long>(expected))};
}

verdict scripted_races() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"insert-vs-trim", "grow-vs-delete-residue"}) {
    const auto r = dcveb::run_scenario(name, 1000, 1);
    const bool ok = r.iterations == 1000 && r.walk_violations == 0 && r.lost_inserts == 0 &&
                    r.wrong_contents == 0;
    pass = pass && ok;
    detail += fmt("%s%s: %u iterations, %u walk violations, %u lost inserts, %u wrong contents",
                  detail.empty() ? "" : "; ", name, r.iterations, r.walk_violations,
                  r.lost_inserts, r.wrong_contents);
    for (const auto& f : r.failures) std::fprintf(stderr, "%s: %s\n", name, f.c_str());
  }
  return {pass, detail};
}

verdict stress() {
  dcveb::stress_config cfg;
  cfg.getters = cfg.inserters = cfg.removers = cfg.successors = 8;
  cfg.ops_per_thread = 100000;
  cfg.key_range = 1000000;
  cfg.seconds_cap = 120;
  const auto out = dcveb::run_stress(cfg);
  for (const auto& v : out.report.violations)
    std::fprintf(stderr, "stress violation %s at %s\n", v.invariant.c_str(), v.path.c_str());
  return {out.report.ok() && out.seconds < 120.0,
          fmt("g=i=r=s=8, z=100000, m=1000000: %zu walk violations, %.2f s (limit 120 s), "
              "%u hardware threads",
              out.report.violations.size(), out.seconds, std::thread::hardware_concurrency())};
}

verdict bench_shape() {
  namespace bench = dcveb::bench;
  bench::workload_config cfg;
  cfg.getters = cfg.inserters = cfg.removers = cfg.successors = 4;
  cfg.ops = 100000;
  cfg.repeats = 3;
  cfg.structure = "dcveb";
  const auto d = bench::run_workload(cfg);
  cfg.structure = "locked-oracle";
  const auto o = bench::run_workload(cfg);
  const double g = d.group_mean_millis.at(bench::group::getters);
  const double s = d.group_mean_millis.at(bench::group::successors);
  const double i = d.group_mean_millis.at(bench::group::inserters);
  return {d.mean_millis < o.mean_millis && g <= s && s <= i,
          fmt("g=i=r=s=4, z=100000, m=%llu, 3 repeats: dcveb mean %.2f ms vs locked-oracle "
              "%.2f ms; dcveb get %.2f <= successor %.2f <= insert %.2f ms",
              static_cast<unsigned long long>(cfg.key_range), d.mean_millis, o.mean_millis, g, s,
              i)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<verdict()>>> criteria{
      {"sequential-oracle-equivalence", sequential_equivalence},
      {"exhaustive-small-space", exhaustive_small_space},
      {"linearizability", linearizability},
      {"successor-liveness", successor_liveness},
      {"growth-trim-arithmetic", growth_trim_arithmetic},
      {"memory-bound", memory_bound},
      {"scripted-races", scripted_races},
      {"stress-liveness", stress},
      {"benchmark-shape", bench_shape},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto v = run();
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
