// SPDX-License-Identifier: Apache-2.0
#pragma once

// Quality metrics of allocations: discrepancy, KL divergence of the table
// densities, entropy, expected bits of the tabled codec, relative excess of
// the shifted code, and performance profiles over sample corpora.
//
// Discrepancy and relative excess are exact rationals. The information
// measures are doubles.

#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ans/core.hpp"
#include "ans/tans.hpp"

namespace ans {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// max over N in [1, n_max] and s of |c_s N - Q n(s, N)|, i.e. the
/// discrepancy scaled by Q. Zero-tolerance checks compare this against Q.
inline Count max_scaled_deviation(const Allocation& alloc, Count n_max) {
  const auto& ft = alloc.freq();
  const auto q = static_cast<__int128>(alloc.period());
  std::vector<Count> seen(ft.size(), 0);
  __int128 worst = 0;
  for (Count n = 1; n <= n_max; ++n) {
    ++seen[alloc.at(n - 1)];
    for (Symbol s = 0; s < ft.size(); ++s) {
      const __int128 dev = static_cast<__int128>(ft.count(s)) * n - q * seen[s];
      worst = std::max(worst, dev < 0 ? -dev : dev);
    }
  }
  return static_cast<Count>(worst);
}

/// sup over N <= n_max of max_s |N f(s) - rank(s, N - 1)|. By periodicity
/// n_max = Q already attains the supremum.
inline Rational max_discrepancy(const Allocation& alloc, Count n_max) {
  if (n_max < 1) throw Error(Errc::InvalidArgument, "n_max must be >= 1");
  return {static_cast<std::int64_t>(max_scaled_deviation(alloc, n_max)), static_cast<std::int64_t>(alloc.period())};
}

/// N_s - n / f(s), where N_s - 1 is the index of the n-th occurrence of s.
inline Rational occurrence_deviation(const Allocation& alloc, Symbol s, Count n) {
  const auto ns = static_cast<std::int64_t>(select(alloc, s, n) + 1);
  const auto c = static_cast<std::int64_t>(alloc.freq().count(s));
  return Rational(ns) - Rational(static_cast<std::int64_t>(n) * static_cast<std::int64_t>(alloc.period()), c);
}

/// max over occurrences n = 1..n_max of |N_s - n / f(s)|.
inline Rational max_occurrence_deviation(const Allocation& alloc, Symbol s, Count n_max) {
  Rational worst(0);
  for (Count n = 1; n <= n_max; ++n) worst = std::max(worst, boost::abs(occurrence_deviation(alloc, s, n)));
  return worst;
}

/// D_KL(f || q_N) in nats with q_N(s) = n(s, N) / N. Returns +inf when some
/// symbol has not been seen among the first N entries.
inline double kl_divergence(const Allocation& alloc, Count n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "N must be >= 1");
  const auto& ft = alloc.freq();
  double total = 0.0;
  for (Symbol s = 0; s < ft.size(); ++s) {
    const Count seen = count_before(alloc, s, n);
    if (seen == 0) return std::numeric_limits<double>::infinity();
    // N c_s / (Q n_s) from integer products, so matching counts give log(1) = 0
    const auto num = static_cast<long double>(static_cast<unsigned __int128>(n) * ft.count(s));
    const auto den = static_cast<long double>(static_cast<unsigned __int128>(ft.period()) * seen);
    total += ft.probability(s) * static_cast<double>(std::log(num / den));
  }
  return total;
}

inline double shannon_entropy(const FrequencyTable& ft, double base = 2.0) {
  if (!(base > 1.0)) throw Error(Errc::InvalidArgument, "entropy base must exceed 1");
  double h = 0.0;
  for (Symbol s = 0; s < ft.size(); ++s) {
    const double f = ft.probability(s);
    h -= f * std::log(f);
  }
  return h / std::log(base);
}

/// Words enumerated by the exhaustive metrics are capped at this many.
inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;

namespace detail {

inline bool power_exceeds(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > limit) return true;
  }
  return false;
}

template <class Int>
void expected_bits_walk(const Allocation& alloc, const Int& state, double prob, std::size_t depth,
                        std::size_t m, Count start_bits, double& acc) {
  if (depth == m) {
    acc += prob * static_cast<double>(static_cast<std::int64_t>(bits(state)) - static_cast<std::int64_t>(start_bits));
    return;
  }
  const auto& ft = alloc.freq();
  for (Symbol s = 0; s < ft.size(); ++s)
    expected_bits_walk(alloc, encode_symbol(alloc, s, state), prob * ft.probability(s), depth + 1, m, start_bits,
                       acc);
}

}  // namespace detail

/// EB(n): the mean over all words of length m, weighted by their
/// probability, of (bits(C(w, n)) - bits(n)) / m. Exhaustive.
inline double expected_bits(const Allocation& alloc, std::size_t m, const CodecState& n) {
  if (m < 1) throw Error(Errc::InvalidArgument, "word length must be >= 1");
  if (n < 0) throw Error(Errc::InvalidArgument, "state must be non-negative");
  const auto& ft = alloc.freq();
  if (detail::power_exceeds(ft.size(), m, kMaxEnumeration))
    throw Error(Errc::EnumerationTooLarge, "|S|^m exceeds 10^7 words");
  double acc = 0.0;
  const Count start_bits = bits(n);
  // Every step maps x to less than (x + 1) Q, so (n + 1) Q^m bounds the states.
  const bool fits_u64 = n < (CodecState(1) << 62) && !detail::power_exceeds(
                                                         alloc.period(), m, ((std::uint64_t{1} << 62) /
                                                                             (static_cast<std::uint64_t>(n) + 1)));
  if (fits_u64)
    detail::expected_bits_walk(alloc, static_cast<std::uint64_t>(n), 1.0, 0, m, start_bits, acc);
  else
    detail::expected_bits_walk(alloc, n, 1.0, 0, m, start_bits, acc);
  return acc / static_cast<double>(m);
}

namespace detail {

struct ExcessWalk {
  const Allocation& alloc;
  std::int64_t p_num;
  std::int64_t p_den;
  std::uint64_t words = 0;
  std::uint64_t max_code = 0;

  // A word stays in S*_p while prod(c) * p_den >= p_num * Q^len.
  void visit(std::uint64_t code, const CodecState& prod_counts, const CodecState& q_power) {
    if (++words > kMaxEnumeration) throw Error(Errc::EnumerationTooLarge, "|S*_p| exceeds 10^7 words");
    max_code = std::max(max_code, code);
    const auto& ft = alloc.freq();
    const CodecState next_q = q_power * alloc.period();
    for (Symbol s = 0; s < ft.size(); ++s) {
      const CodecState next_prod = prod_counts * ft.count(s);
      if (next_prod * p_den < next_q * p_num) continue;
      if (code >= (std::uint64_t{1} << 62) / (alloc.period() + 1))
        throw Error(Errc::Overflow, "shifted code left the 64-bit range");
      visit(select(alloc, s, code + 1) + 1, next_prod, next_q);
    }
  }
};

}  // namespace detail

/// RE(p) = max_{w in S*_p} C~(w, 0) / |S*_p| where S*_p holds the words
/// (including the empty word) whose symbol probabilities multiply to >= p.
inline Rational relative_excess(const Allocation& alloc, const Rational& p) {
  if (p <= 0 || p > 1) throw Error(Errc::InvalidArgument, "p must lie in (0, 1]");
  detail::ExcessWalk walk{alloc, p.numerator(), p.denominator()};
  walk.visit(0, CodecState(1), CodecState(1));
  return {static_cast<std::int64_t>(walk.max_code), static_cast<std::int64_t>(walk.words)};
}

struct ProfileCurve {
  std::string algorithm;
  std::vector<double> thresholds;
  std::vector<double> fractions;
};

/// Per algorithm, the fraction of samples whose quotient is <= each
/// threshold. `quotients[a][k]` is algorithm a on sample k.
inline std::vector<ProfileCurve> performance_profile(const std::vector<std::string>& algorithms,
                                                     const std::vector<std::vector<double>>& quotients,
                                                     const std::vector<double>& thresholds) {
  if (algorithms.size() != quotients.size())
    throw Error(Errc::InvalidArgument, "one quotient row per algorithm is required");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw Error(Errc::InvalidArgument, "thresholds must be sorted");
  std::vector<ProfileCurve> curves;
  curves.reserve(algorithms.size());
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    std::vector<double> sorted = quotients[a];
    for (double v : sorted)
      if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "quotients must be finite");
    std::sort(sorted.begin(), sorted.end());
    ProfileCurve curve{algorithms[a], thresholds, {}};
    curve.fractions.reserve(thresholds.size());
    for (double t : thresholds) {
      const auto hits = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
      curve.fractions.push_back(sorted.empty() ? 1.0
                                               : static_cast<double>(hits) / static_cast<double>(sorted.size()));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace ans
