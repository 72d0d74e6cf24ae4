// SPDX-License-Identifier: Apache-2.0
#pragma once

// Table generators.
//
// Baselines: ranged (contiguous blocks), Duda's priority-queue spreading in
// both initialisations, and the Dube-Yokoo sort iteration for the stream
// codec. The deadline-driven generators (earliest deadline first, shifted
// priorities, greedy discrepancy minimisation) keep
//
//     |f(s) N - rank(s, N - 1)| <= 1   for every s and N,
//
// by only ever allocating a symbol that passes the schedulability test
// implemented in verify_theorem_criteria(). All comparisons of f(s) N
// against counts are done in integers scaled by Q.
//
// Ties bottom out at symbol construction order everywhere, so the same
// FrequencyTable always yields the same table.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ans/core.hpp"
#include "ans/markov.hpp"
#include "ans/stream.hpp"

namespace ans {

enum class Algorithm { Ranged, Duda09, Duda13, Edf, Shifted, Greedy, DubeYokoo };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Ranged, Algorithm::Duda09,  Algorithm::Duda13,
                                               Algorithm::Edf,    Algorithm::Shifted, Algorithm::Greedy,
                                               Algorithm::DubeYokoo};

inline constexpr Algorithm kCriteriaAlgorithms[] = {Algorithm::Edf, Algorithm::Shifted, Algorithm::Greedy};

constexpr std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Ranged: return "ranged";
    case Algorithm::Duda09: return "duda09";
    case Algorithm::Duda13: return "duda13";
    case Algorithm::Edf: return "edf";
    case Algorithm::Shifted: return "shifted";
    case Algorithm::Greedy: return "greedy";
    case Algorithm::DubeYokoo: return "dube-yokoo";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  throw Error(Errc::InvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

inline Allocation ranged(const FrequencyTable& ft) {
  std::vector<Symbol> order(ft.size());
  std::iota(order.begin(), order.end(), Symbol{0});
  std::stable_sort(order.begin(), order.end(), [&](Symbol a, Symbol b) { return ft.count(a) > ft.count(b); });
  std::vector<Symbol> table;
  table.reserve(ft.period());
  for (Symbol s : order) table.insert(table.end(), ft.count(s), s);
  return Allocation(ft, std::move(table));
}

/// Initial heap value of Duda's spreading: 1/(2 f(s)) in the later variant,
/// 1/f(s) in the original one.
enum class DudaVariant { Half, One };

inline Allocation duda(const FrequencyTable& ft, DudaVariant variant) {
  // The k-th value of s (k = 0, 1, ...) is Q (2k + 1) / (2 c_s) for Half and
  // Q (k + 1) / c_s = Q (2k + 2) / (2 c_s) for One. The common factor Q / 2
  // drops out, leaving odd_or_even(k) / c_s compared by cross-multiplication.
  struct Entry {
    std::uint64_t numer;
    Symbol s;
  };
  const auto later = [&ft](const Entry& a, const Entry& b) {
    const auto lhs = static_cast<unsigned __int128>(a.numer) * ft.count(b.s);
    const auto rhs = static_cast<unsigned __int128>(b.numer) * ft.count(a.s);
    if (lhs != rhs) return lhs > rhs;
    if (ft.count(a.s) != ft.count(b.s)) return ft.count(a.s) > ft.count(b.s);
    return a.s > b.s;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  const std::uint64_t first = variant == DudaVariant::Half ? 1 : 2;
  for (Symbol s = 0; s < ft.size(); ++s) heap.push({first, s});
  std::vector<Symbol> table;
  table.reserve(ft.period());
  for (Count n = 0; n < ft.period(); ++n) {
    const Entry e = heap.top();
    heap.pop();
    heap.push({e.numer + 2, e.s});
    table.push_back(e.s);
  }
  return Allocation(ft, std::move(table));
}

namespace detail {

/// Fenwick tree counting outstanding hard deadlines by value.
class DeadlineCounter {
 public:
  explicit DeadlineCounter(std::size_t max_value) : tree_(max_value + 2, 0) {}

  void add(std::size_t value, std::int64_t delta) {
    for (std::size_t i = value + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  /// Number of deadlines with value <= bound.
  std::int64_t at_most(std::size_t bound) const {
    std::int64_t sum = 0;
    for (std::size_t i = std::min(bound + 1, tree_.size() - 1); i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::int64_t> tree_;
};

/// Hard deadlines of the deadline-driven generators over `periods` periods.
/// The n-th occurrence of s must sit at an index below
/// K(s, n) = min{M : floor(f(s) M) >= n}; a job is removed when its symbol is
/// allocated, so the outstanding jobs of s are n = numAlloc[s] + 1 ... .
class DeadlineBook {
 public:
  DeadlineBook(const FrequencyTable& ft, Count periods)
      : ft_(ft), horizon_(periods * ft.period()), counter_(horizon_), allocated_(ft.size(), 0),
        total_(ft.size()) {
    for (Symbol s = 0; s < ft.size(); ++s) {
      total_[s] = periods * ft.count(s);
      for (Count n = 1; n <= total_[s]; ++n) counter_.add(first_index_reaching(ft, s, n), 1);
    }
  }

  Count horizon() const noexcept { return horizon_; }
  Count allocated(Symbol s) const { return allocated_[s]; }

  /// Earliest outstanding deadline of s, or nullopt when all jobs are done.
  std::optional<Count> earliest(Symbol s) const {
    if (allocated_[s] >= total_[s]) return std::nullopt;
    return first_index_reaching(ft_, s, allocated_[s] + 1);
  }

  std::int64_t outstanding_at_most(Count bound) const { return counter_.at_most(bound); }

  void allocate(Symbol s) {
    if (auto k = earliest(s)) counter_.add(*k, -1);
    ++allocated_[s];
  }

  /// The look-ahead bound: the first L in (N, limit) at which the deadlines
  /// due by L fill all L - N slots, or `limit` if there is none.
  Count tight_bound(Count n, Count limit) const {
    Count l = n + 1;
    while (l < limit && outstanding_at_most(l) < static_cast<std::int64_t>(l - n)) ++l;
    return l;
  }

 private:
  const FrequencyTable& ft_;
  Count horizon_;
  DeadlineCounter counter_;
  std::vector<Count> allocated_;
  std::vector<Count> total_;
};

/// Spawns: the job for occurrence n + 1 of s becomes available at index
/// K(s, n). Reports, per step, which symbols spawned.
class SpawnSchedule {
 public:
  SpawnSchedule(const FrequencyTable& ft, Count periods) : ft_(ft), next_(ft.size(), 1), total_(ft.size()) {
    for (Symbol s = 0; s < ft.size(); ++s) total_[s] = periods * ft.count(s);
  }

  template <class F>
  void at(Count n, F&& on_spawn) {
    for (Symbol s = 0; s < ft_.size(); ++s) {
      while (next_[s] <= total_[s] && first_index_reaching(ft_, s, next_[s]) == n) {
        ++next_[s];
        on_spawn(s);
      }
    }
  }

 private:
  const FrequencyTable& ft_;
  std::vector<Count> next_;
  std::vector<Count> total_;
};

[[noreturn]] inline void no_candidate(std::string_view algo, Count n) {
  throw std::logic_error(std::string(algo) + ": no admissible symbol at index " + std::to_string(n));
}

}  // namespace detail

/// Earliest deadline first over `periods` periods. Among the symbols with
/// numAlloc[s] = floor(f(s) N), picks the one whose next deadline
/// U = min{M : floor(f(s) M) >= numAlloc[s] + 1} is earliest; ties go to the
/// smaller numAlloc[s] - f(s)(N + 1), then to the smaller probability, then
/// to construction order.
inline std::vector<Symbol> edf_sequence(const FrequencyTable& ft, Count periods = 1) {
  const Count length = periods * ft.period();
  const auto q = static_cast<__int128>(ft.period());
  std::vector<Count> num_alloc(ft.size(), 0);
  std::vector<Symbol> out;
  out.reserve(length);
  for (Count n = 0; n < length; ++n) {
    std::optional<Symbol> pick;
    Count best_u = std::numeric_limits<Count>::max();
    __int128 best_v = 0;  // scaled by Q
    for (Symbol s = 0; s < ft.size(); ++s) {
      if (num_alloc[s] != scaled_floor(ft, s, n)) continue;
      if (pick && scaled_floor(ft, s, best_u) < num_alloc[s] + 1) continue;
      const Count u = first_index_reaching(ft, s, num_alloc[s] + 1);
      const __int128 v = static_cast<__int128>(num_alloc[s]) * q - static_cast<__int128>(ft.count(s)) * (n + 1);
      if (!pick || u < best_u || v < best_v || (v == best_v && ft.count(s) < ft.count(*pick))) {
        pick = s;
        best_u = u;
        best_v = v;
      }
    }
    if (!pick) detail::no_candidate("edf", n);
    ++num_alloc[*pick];
    out.push_back(*pick);
  }
  return out;
}

inline Allocation edf(const FrequencyTable& ft) { return Allocation(ft, edf_sequence(ft, 1)); }

/// Shifted priorities over `periods` periods. Symbols carry a soft deadline
/// min{M : floor(f(s) M + 1/2) >= k} that steers them towards the centres
/// (k - 1/2) / f(s); the hard-deadline look-ahead overrides the soft choice
/// whenever following it would make some deadline unmeetable.
inline std::vector<Symbol> shifted_priorities_sequence(const FrequencyTable& ft, Count periods = 1) {
  const Count q = ft.period();
  detail::DeadlineBook deadlines(ft, periods);
  detail::SpawnSchedule spawns(ft, periods);
  // (soft deadline, count, symbol); smaller probability wins ties.
  using Key = std::tuple<Count, Count, Symbol>;
  std::multiset<Key> symbol_queue;
  std::vector<std::multiset<Count>> keys_of(ft.size());
  std::vector<Count> spawn_counter(ft.size(), 1);
  const auto enqueue = [&](Symbol s, Count key) {
    symbol_queue.emplace(key, ft.count(s), s);
    keys_of[s].insert(key);
  };
  for (Symbol s = 0; s < ft.size(); ++s) enqueue(s, first_index_reaching(ft, s, 1));

  const Count length = periods * q;
  std::vector<Symbol> out;
  out.reserve(length);
  for (Count n = 0; n < length; ++n) {
    spawns.at(n, [&](Symbol s) {
      const Count k = spawn_counter[s] + 1;
      ++spawn_counter[s];
      // The first job of every later period is keyed like the initial one,
      // by its hard deadline, so each period repeats the same choices.
      if ((k - 1) % ft.count(s) == 0) return enqueue(s, first_index_reaching(ft, s, k));
      // min{M : floor((2 c_s M + Q) / 2Q) >= k} = ceil(Q (2k - 1) / (2 c_s))
      const auto num = static_cast<unsigned __int128>(q) * (2 * k - 1);
      const auto den = static_cast<unsigned __int128>(2) * ft.count(s);
      enqueue(s, static_cast<Count>((num + den - 1) / den));
    });
    if (symbol_queue.empty()) detail::no_candidate("shifted", n);
    Symbol pick = std::get<2>(*symbol_queue.begin());
    const auto due = deadlines.earliest(pick);
    if (!due) detail::no_candidate("shifted", n);
    const Count bound = deadlines.tight_bound(n, *due);
    if (bound < *due) {
      bool found = false;
      for (const auto& [key, count, s] : symbol_queue) {
        const auto d = deadlines.earliest(s);
        if (d && *d <= bound) {
          pick = s;
          found = true;
          break;
        }
      }
      if (!found) detail::no_candidate("shifted", n);
    }
    out.push_back(pick);
    deadlines.allocate(pick);
    const Count smallest = *keys_of[pick].begin();
    keys_of[pick].erase(keys_of[pick].begin());
    symbol_queue.erase(symbol_queue.find(Key{smallest, ft.count(pick), pick}));
  }
  return out;
}

inline Allocation shifted_priorities(const FrequencyTable& ft) {
  return Allocation(ft, shifted_priorities_sequence(ft, 1));
}

/// Greedy discrepancy minimisation over `periods` periods: among the spawned
/// symbols whose next hard deadline falls within the look-ahead bound, pick
/// the one maximising f(s)(N + 1) - numAlloc[s]; ties go to the smaller
/// probability, then construction order.
inline std::vector<Symbol> greedy_discrepancy_sequence(const FrequencyTable& ft, Count periods = 1) {
  const Count q = ft.period();
  const Count length = periods * q;
  detail::DeadlineBook deadlines(ft, periods);
  detail::SpawnSchedule spawns(ft, periods);
  std::vector<Count> available(ft.size(), 1);
  std::vector<Symbol> out;
  out.reserve(length);
  for (Count n = 0; n < length; ++n) {
    spawns.at(n, [&](Symbol s) { ++available[s]; });
    const Count bound = deadlines.tight_bound(n, length);
    std::optional<Symbol> pick;
    __int128 best = 0;  // f(s)(N + 1) - numAlloc[s], scaled by Q
    for (Symbol s = 0; s < ft.size(); ++s) {
      if (available[s] == 0) continue;
      const auto due = deadlines.earliest(s);
      if (!due || *due > bound) continue;
      const __int128 u = static_cast<__int128>(ft.count(s)) * (n + 1) -
                         static_cast<__int128>(q) * deadlines.allocated(s);
      if (!pick || u > best || (u == best && ft.count(s) < ft.count(*pick))) {
        pick = s;
        best = u;
      }
    }
    if (!pick) detail::no_candidate("greedy", n);
    out.push_back(*pick);
    deadlines.allocate(*pick);
    --available[*pick];
  }
  return out;
}

inline Allocation greedy_discrepancy(const FrequencyTable& ft) {
  return Allocation(ft, greedy_discrepancy_sequence(ft, 1));
}

/// Checks the two schedulability conditions at every index of one period:
///  (i)  rank(A[N], N - 1) = floor(f N) or floor(f (N + 1)) = floor(f N) + 1,
///       with f = f(A[N]);
///  (ii) for N + 1 <= M < min{L : floor(f L) >= rank(A[N], N)},
///       sum_s max(0, floor(f(s) M) - rank(s, N - 1)) < M - N.
inline bool verify_theorem_criteria(const Allocation& alloc) {
  const auto& ft = alloc.freq();
  const Count q = alloc.period();
  std::vector<Count> before(ft.size(), 0);
  for (Count n = 0; n < q; ++n) {
    const Symbol s = alloc[n];
    const Count floor_now = scaled_floor(ft, s, n);
    const bool cond_i = before[s] == floor_now || scaled_floor(ft, s, n + 1) == floor_now + 1;
    if (!cond_i) return false;
    const Count limit = first_index_reaching(ft, s, before[s] + 1);
    for (Count m = n + 1; m < limit; ++m) {
      Count deficit = 0;
      for (Symbol t = 0; t < ft.size(); ++t) {
        const Count due = scaled_floor(ft, t, m);
        if (due > before[t]) deficit += due - before[t];
      }
      if (deficit >= m - n) return false;
    }
    ++before[s];
  }
  return true;
}

struct DubeYokooResult {
  Allocation best;
  double best_ewl;
  std::size_t iterations;
  bool cycle_detected;
};

/// Dube-Yokoo iteration with I = [Q, BQ - 1]: starting from the ranged table,
/// repeatedly reorder the table positions by descending invariant
/// probability until a table repeats or `max_iters` tables were evaluated,
/// and keep the evaluated table with the smallest EWL (earliest on ties).
/// Position i of the table collects the invariant mass of all x = i mod Q.
inline DubeYokooResult dube_yokoo_run(const FrequencyTable& ft, std::uint64_t base, std::size_t max_iters) {
  if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
  const Count q = ft.period();
  Allocation current = ranged(ft);
  std::set<std::vector<Symbol>> seen;
  std::optional<Allocation> best;
  double best_ewl = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool cycle = false;
  while (iterations < max_iters) {
    std::vector<Symbol> table(current.table().begin(), current.table().end());
    if (!seen.insert(table).second) {
      cycle = true;
      break;
    }
    ++iterations;
    const StreamConfig cfg(current, base, q);
    const auto p = invariant_measure(transition_matrix(cfg));
    const double ewl = expected_word_length(cfg, p);
    if (!best || ewl < best_ewl) {
      best = current;
      best_ewl = ewl;
    }
    std::vector<double> weight(q, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) weight[(cfg.lower() + i) % q] += p[i];
    std::vector<std::size_t> order(q);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    std::vector<Symbol> next(q);
    for (std::size_t j = 0; j < q; ++j) next[j] = table[order[j]];
    current = Allocation(ft, std::move(next));
  }
  return {std::move(*best), best_ewl, iterations, cycle};
}

inline Allocation dube_yokoo(const FrequencyTable& ft, std::uint64_t base = 2, std::size_t max_iters = 100) {
  return dube_yokoo_run(ft, base, max_iters).best;
}

struct GenerateOptions {
  std::uint64_t base = 2;       // Dube-Yokoo only
  std::size_t max_iters = 100;  // Dube-Yokoo only
};

inline Allocation generate(Algorithm algo, const FrequencyTable& ft, const GenerateOptions& opts = {}) {
  switch (algo) {
    case Algorithm::Ranged: return ranged(ft);
    case Algorithm::Duda09: return duda(ft, DudaVariant::One);
    case Algorithm::Duda13: return duda(ft, DudaVariant::Half);
    case Algorithm::Edf: return edf(ft);
    case Algorithm::Shifted: return shifted_priorities(ft);
    case Algorithm::Greedy: return greedy_discrepancy(ft);
    case Algorithm::DubeYokoo: return dube_yokoo(ft, opts.base, opts.max_iters);
  }
  throw Error(Errc::InvalidArgument, "unknown algorithm");
}

/// `periods` consecutive periods of a deadline-driven generator, without
/// folding them into one table.
inline std::vector<Symbol> generate_sequence(Algorithm algo, const FrequencyTable& ft, Count periods) {
  switch (algo) {
    case Algorithm::Edf: return edf_sequence(ft, periods);
    case Algorithm::Shifted: return shifted_priorities_sequence(ft, periods);
    case Algorithm::Greedy: return greedy_discrepancy_sequence(ft, periods);
    default: break;
  }
  throw Error(Errc::InvalidArgument, std::string(to_string(algo)) + " has no multi-period form");
}

}  // namespace ans
