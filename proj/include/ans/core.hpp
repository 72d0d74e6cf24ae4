// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact frequency arithmetic and periodic allocations.
//
// A FrequencyTable stands in for the probability measure f(s) = c_s / Q with
// positive integer counts. An Allocation is one period (length Q) of a
// periodic symbol sequence A: Z>=0 -> S, and answers rank/select over the
// whole periodic extension. Everything here is integer arithmetic; callers
// that need f(s) as a real number go through FrequencyTable::probability().

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ans/error.hpp"

namespace ans {

/// Index of a symbol in its FrequencyTable. Construction order is the
/// canonical tie-break order used by every generator.
using Symbol = std::size_t;
using Count = std::uint64_t;

class FrequencyTable {
 public:
  FrequencyTable(std::vector<std::string> symbols, const std::vector<std::int64_t>& counts) {
    if (symbols.size() != counts.size())
      throw Error(Errc::InvalidArgument, "symbol and count lists differ in length");
    if (symbols.empty()) throw Error(Errc::EmptyAlphabet, "frequency table needs at least one symbol");
    counts_.reserve(counts.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (counts[i] < 1)
        throw Error(Errc::NonPositiveCount, "count of '" + symbols[i] + "' is " + std::to_string(counts[i]));
      if (!index_.emplace(symbols[i], i).second)
        throw Error(Errc::DuplicateSymbol, "symbol '" + symbols[i] + "' listed twice");
      const auto c = static_cast<Count>(counts[i]);
      if (period_ > kMaxPeriod - c) throw Error(Errc::Overflow, "table length exceeds 2^40");
      period_ += c;
      counts_.push_back(c);
      min_count_ = std::min(min_count_, c);
    }
    symbols_ = std::move(symbols);
  }

  /// Tables beyond 2^40 entries are refused so that c_s * M products with
  /// M < 2^64 fit comfortably in 128-bit intermediates.
  static constexpr Count kMaxPeriod = Count{1} << 40;

  std::size_t size() const noexcept { return symbols_.size(); }
  Count period() const noexcept { return period_; }
  Count count(Symbol s) const { return counts_.at(s); }
  Count min_count() const noexcept { return min_count_; }
  const std::string& name(Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& names() const noexcept { return symbols_; }
  const std::vector<Count>& counts() const noexcept { return counts_; }

  double probability(Symbol s) const {
    return static_cast<double>(count(s)) / static_cast<double>(period_);
  }

  std::optional<Symbol> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol index_of(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw Error(Errc::UnknownSymbol, "symbol '" + std::string(name) + "' is not in the table");
  }

  void check(Symbol s) const {
    if (s >= size()) throw Error(Errc::UnknownSymbol, "symbol index " + std::to_string(s) + " out of range");
  }

  friend bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
    return a.symbols_ == b.symbols_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> symbols_;
  std::vector<Count> counts_;
  std::unordered_map<std::string, Symbol> index_;
  Count period_ = 0;
  Count min_count_ = std::numeric_limits<Count>::max();
};

inline FrequencyTable build_frequency_table(const std::vector<std::pair<std::string, std::int64_t>>& counts) {
  std::vector<std::string> names;
  std::vector<std::int64_t> values;
  names.reserve(counts.size());
  values.reserve(counts.size());
  for (const auto& [name, c] : counts) {
    names.push_back(name);
    values.push_back(c);
  }
  return FrequencyTable(std::move(names), values);
}

/// floor(f(s) * m) computed as (c_s * m) div Q.
inline Count scaled_floor(const FrequencyTable& ft, Symbol s, Count m) {
  ft.check(s);
  const auto prod = static_cast<unsigned __int128>(ft.count(s)) * m;
  return static_cast<Count>(prod / ft.period());
}

/// Smallest m >= 0 with floor(f(s) * m) >= k, i.e. ceil(k * Q / c_s).
inline Count first_index_reaching(const FrequencyTable& ft, Symbol s, Count k) {
  ft.check(s);
  const auto num = static_cast<unsigned __int128>(k) * ft.period();
  const auto c = ft.count(s);
  return static_cast<Count>((num + c - 1) / c);
}

class Allocation {
 public:
  /// Takes ownership of a period that is already known to be consistent
  /// with `ft`. Use validate_allocation() for untrusted input.
  Allocation(FrequencyTable ft, std::vector<Symbol> table) : freq_(std::move(ft)), table_(std::move(table)) {
    if (table_.size() != freq_.period())
      throw Error(Errc::LengthMismatch, "table has " + std::to_string(table_.size()) + " entries, expected " +
                                            std::to_string(freq_.period()));
    occ_.assign(freq_.size(), {});
    rank_at_.resize(table_.size());
    for (std::size_t i = 0; i < table_.size(); ++i) {
      const Symbol s = table_[i];
      if (s >= freq_.size()) throw Error(Errc::UnknownSymbol, "table entry " + std::to_string(i) + " out of range");
      occ_[s].push_back(i);
      rank_at_[i] = occ_[s].size();
    }
    for (Symbol s = 0; s < freq_.size(); ++s) {
      if (occ_[s].size() != freq_.count(s))
        throw Error(Errc::CountMismatch, "symbol '" + freq_.name(s) + "' appears " + std::to_string(occ_[s].size()) +
                                             " times, expected " + std::to_string(freq_.count(s)));
    }
  }

  const FrequencyTable& freq() const noexcept { return freq_; }
  Count period() const noexcept { return freq_.period(); }
  std::span<const Symbol> table() const noexcept { return table_; }
  std::span<const std::size_t> occurrences(Symbol s) const { return occ_.at(s); }

  Symbol operator[](std::size_t i) const { return table_[i]; }

  /// Occurrences of table[i] among table[0..i], for i in [0, Q).
  Count rank_in_period(std::size_t i) const { return rank_at_[i]; }

  /// Symbol at any index of the periodic extension.
  template <class Int>
  Symbol at(const Int& n) const {
    return table_[static_cast<std::size_t>(n % period())];
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(table_.size());
    for (Symbol s : table_) out.push_back(freq_.name(s));
    return out;
  }

  friend bool operator==(const Allocation& a, const Allocation& b) {
    return a.freq_ == b.freq_ && a.table_ == b.table_;
  }

 private:
  FrequencyTable freq_;
  std::vector<Symbol> table_;
  std::vector<std::vector<std::size_t>> occ_;
  std::vector<Count> rank_at_;
};

inline Allocation validate_allocation(const std::vector<std::string>& table, const FrequencyTable& ft) {
  if (table.size() != ft.period())
    throw Error(Errc::LengthMismatch,
                "allocation has " + std::to_string(table.size()) + " entries, expected " + std::to_string(ft.period()));
  std::vector<Symbol> indices;
  indices.reserve(table.size());
  for (const auto& name : table) indices.push_back(ft.index_of(name));
  return Allocation(ft, std::move(indices));
}

/// Occurrences of s at indices m <= n of the periodic extension.
template <class Int>
Int rank(const Allocation& alloc, Symbol s, const Int& n) {
  alloc.freq().check(s);
  const Count q = alloc.period();
  const Int whole = n / q;
  const auto rem = static_cast<std::size_t>(n % q);
  const auto occ = alloc.occurrences(s);
  const auto partial = static_cast<Count>(std::upper_bound(occ.begin(), occ.end(), rem) - occ.begin());
  return Int(whole * alloc.freq().count(s) + partial);
}

/// n(s, N): occurrences of s strictly before index N, i.e. rank(s, N - 1)
/// with rank(s, -1) = 0.
template <class Int>
Int count_before(const Allocation& alloc, Symbol s, const Int& n) {
  if (n == 0) {
    alloc.freq().check(s);
    return Int(0);
  }
  return rank(alloc, s, Int(n - 1));
}

/// Index of the n-th (n >= 1) occurrence of s in the periodic extension.
template <class Int>
Int select(const Allocation& alloc, Symbol s, const Int& n) {
  alloc.freq().check(s);
  if (n < 1) throw Error(Errc::NonPositiveOrdinal, "select ordinal must be >= 1");
  const Count c = alloc.freq().count(s);
  const Int k = n - 1;
  const auto within = static_cast<std::size_t>(k % c);
  return Int((k / c) * alloc.period() + alloc.occurrences(s)[within]);
}

}  // namespace ans
