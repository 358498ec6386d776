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

#ifndef DCVEB_BENCH_WORKLOAD_HPP
#define DCVEB_BENCH_WORKLOAD_HPP

/// \file
/// Thread-group workload runner. Four groups (getters, inserters, removers,
/// successor searchers) each perform a fixed number of calls on uniformly
/// random keys; every thread's wall time over its whole call loop is
/// recorded.

#include <algorithm>
#include <array>
#include <barrier>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dcveb/dcveb_array.hpp"
#include "dcveb/reference_oracle.hpp"

namespace dcveb::bench {

enum class group : unsigned { getters, inserters, removers, successors };

inline constexpr std::array<group, 4> all_groups{group::getters, group::inserters,
                                                 group::removers, group::successors};

[[nodiscard]] inline const char* group_label(group g) noexcept {
  switch (g) {
    case group::getters: return "g";
    case group::inserters: return "i";
    case group::removers: return "r";
    case group::successors: return "s";
  }
  return "?";
}

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct workload_config {
  unsigned getters = 1;
  unsigned inserters = 1;
  unsigned removers = 1;
  unsigned successors = 1;
  std::uint64_t ops = 1000;         // z, calls per thread
  key_type key_range = 500000;      // m, keys drawn from [0, m)
  std::string structure = "dcveb";
  std::uint64_t seed = 1;
  unsigned repeats = 1;
  unsigned branching = 64;

  [[nodiscard]] unsigned threads_in(group g) const noexcept {
    switch (g) {
      case group::getters: return getters;
      case group::inserters: return inserters;
      case group::removers: return removers;
      case group::successors: return successors;
    }
    return 0;
  }
  [[nodiscard]] unsigned total_threads() const noexcept {
    return getters + inserters + removers + successors;
  }
};

struct thread_timing {
  unsigned repeat;
  group grp;
  unsigned thread;  // index within the group
  double millis;
};

struct run_result {
  std::string structure;
  workload_config config;
  std::vector<thread_timing> timings;
  double mean_millis = 0;
  std::map<group, double> group_mean_millis;
  std::uint64_t total_operations = 0;
};

/// Minimal dynamic-set surface the runner drives.
class set_adapter {
 public:
  virtual ~set_adapter() = default;
  virtual void insert(key_type key) = 0;
  virtual void erase(key_type key) = 0;
  virtual bool get(key_type key) = 0;
  virtual bool successor(key_type key) = 0;
};

class dcveb_adapter final : public set_adapter {
 public:
  explicit dcveb_adapter(unsigned n) : array_{n} {}
  void insert(key_type key) override { array_.insert(key, key); }
  void erase(key_type key) override { array_.erase(key); }
  bool get(key_type key) override { return array_.get(key).has_value(); }
  bool successor(key_type key) override { return array_.successor(key).has_value(); }

 private:
  dcveb_array<std::uint64_t> array_;
};

/// The sequential oracle behind one global mutex.
class locked_oracle_adapter final : public set_adapter {
 public:
  void insert(key_type key) override {
    std::lock_guard lk{m_};
    oracle_.insert(key, key);
  }
  void erase(key_type key) override {
    std::lock_guard lk{m_};
    oracle_.erase(key);
  }
  bool get(key_type key) override {
    std::lock_guard lk{m_};
    return oracle_.get(key).has_value();
  }
  bool successor(key_type key) override {
    std::lock_guard lk{m_};
    return oracle_.successor(key).has_value();
  }

 private:
  std::mutex m_;
  reference_oracle<std::uint64_t> oracle_;
};

[[nodiscard]] inline std::vector<std::string> adapters() { return {"dcveb", "locked-oracle"}; }

[[nodiscard]] inline std::unique_ptr<set_adapter> make_adapter(const std::string& name,
                                                               unsigned branching = 64) {
  if (name == "dcveb") return std::make_unique<dcveb_adapter>(branching);
  if (name == "locked-oracle") return std::make_unique<locked_oracle_adapter>();
  throw config_error("unknown structure '" + name + "'");
}

/// Deterministic per-thread key source; independent of the adapter.
[[nodiscard]] inline std::mt19937_64 key_stream(std::uint64_t seed, group g, unsigned thread) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(g), thread};
  return std::mt19937_64{seq};
}

[[nodiscard]] inline std::vector<key_type> thread_keys(const workload_config& cfg, group g,
                                                       unsigned thread) {
  auto rng = key_stream(cfg.seed, g, thread);
  std::uniform_int_distribution<key_type> dist{0, cfg.key_range - 1};
  std::vector<key_type> keys(cfg.ops);
  for (auto& k : keys) k = dist(rng);
  return keys;
}

inline void validate(const workload_config& cfg) {
  if (cfg.ops < 1) throw config_error("--ops must be at least 1");
  if (cfg.key_range < 1) throw config_error("--key-range must be at least 1");
  if (cfg.key_range - 1 > max_key) throw config_error("--key-range exceeds the 63-bit key domain");
  if (cfg.repeats < 1) throw config_error("--repeats must be at least 1");
  if (cfg.total_threads() == 0) throw config_error("at least one thread group must be non-empty");
  (void)make_adapter(cfg.structure, cfg.branching);
}

/// Runs cfg.repeats rounds, each on a fresh, empty structure.
inline run_result run_workload(const workload_config& cfg) {
  validate(cfg);
  run_result out;
  out.structure = cfg.structure;
  out.config = cfg;

  for (unsigned repeat = 0; repeat < cfg.repeats; ++repeat) {
    auto set = make_adapter(cfg.structure, cfg.branching);
    struct slot {
      group grp;
      unsigned idx;
      std::vector<key_type> keys;
      double millis = 0;
    };
    std::vector<slot> slots;
    for (auto g : all_groups)
      for (unsigned t = 0; t < cfg.threads_in(g); ++t) slots.push_back({g, t, thread_keys(cfg, g, t)});

    std::barrier start{static_cast<std::ptrdiff_t>(slots.size())};
    std::vector<std::thread> pool;
    pool.reserve(slots.size());
    for (auto& s : slots) {
      pool.emplace_back([&set, &start, &s] {
        std::uint64_t found = 0;
        start.arrive_and_wait();
        const auto t0 = std::chrono::steady_clock::now();
        switch (s.grp) {
          case group::getters:
            for (auto k : s.keys) found += set->get(k);
            break;
          case group::inserters:
            for (auto k : s.keys) set->insert(k);
            break;
          case group::removers:
            for (auto k : s.keys) set->erase(k);
            break;
          case group::successors:
            for (auto k : s.keys) found += set->successor(k);
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();
        s.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
        // Keeps the query loops from being optimized away.
        if (found == ~std::uint64_t{0}) std::abort();
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& s : slots) {
      out.timings.push_back({repeat, s.grp, s.idx, s.millis});
      out.total_operations += cfg.ops;
    }
  }

  double total = 0;
  std::map<group, std::pair<double, unsigned>> per_group;
  for (const auto& t : out.timings) {
    total += t.millis;
    auto& [sum, count] = per_group[t.grp];
    sum += t.millis;
    ++count;
  }
  out.mean_millis = out.timings.empty() ? 0 : total / static_cast<double>(out.timings.size());
  for (const auto& [g, acc] : per_group) out.group_mean_millis[g] = acc.first / acc.second;
  return out;
}

inline constexpr const char* csv_header = "structure,g,i,r,s,z,m,seed,repeat,group,thread,millis";

/// Writes one row per thread per repeat, ordered by structure, repeat, group,
/// thread.
inline void emit_csv(const std::vector<run_result>& results, const std::string& path) {
  struct row {
    const run_result* run;
    thread_timing t;
  };
  std::vector<row> rows;
  for (const auto& r : results)
    for (const auto& t : r.timings) rows.push_back({&r, t});
  std::stable_sort(rows.begin(), rows.end(), [](const row& a, const row& b) {
    if (a.run->structure != b.run->structure) return a.run->structure < b.run->structure;
    if (a.t.repeat != b.t.repeat) return a.t.repeat < b.t.repeat;
    if (a.t.grp != b.t.grp) return a.t.grp < b.t.grp;
    return a.t.thread < b.t.thread;
  });

  std::ofstream out{path, std::ios::trunc};
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << csv_header << '\n';
  for (const auto& [run, t] : rows) {
    const auto& c = run->config;
    out << run->structure << ',' << c.getters << ',' << c.inserters << ',' << c.removers << ','
        << c.successors << ',' << c.ops << ',' << c.key_range << ',' << c.seed << ',' << t.repeat
        << ',' << group_label(t.grp) << ',' << t.thread << ',' << t.millis << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace dcveb::bench

#endif  // DCVEB_BENCH_WORKLOAD_HPP
