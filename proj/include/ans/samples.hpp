// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sample frequency tables: the five fixed evaluation samples and seeded
// random corpora (uniform or truncated Zipf counts).
//
// Random draws use std::mt19937_64, whose output sequence is fixed by the
// C++ standard, and map raw 64-bit words to values by rejection sampling so
// that corpora are identical across standard libraries. The distribution
// classes of <random> are avoided on purpose: their algorithms are
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ans/core.hpp"

namespace ans {

inline constexpr std::string_view kPrngName = "mt19937_64";

enum class SampleKind { Linear, Fibonacci, UniformTable2, ZipfTable2, Alphabet, RandomUniform, RandomZipf };

inline constexpr SampleKind kTable2Kinds[] = {SampleKind::Linear, SampleKind::Fibonacci, SampleKind::UniformTable2,
                                              SampleKind::ZipfTable2, SampleKind::Alphabet};

constexpr std::string_view to_string(SampleKind k) noexcept {
  switch (k) {
    case SampleKind::Linear: return "linear";
    case SampleKind::Fibonacci: return "fibonacci";
    case SampleKind::UniformTable2: return "uniform-table2";
    case SampleKind::ZipfTable2: return "zipf-table2";
    case SampleKind::Alphabet: return "alphabet";
    case SampleKind::RandomUniform: return "random-uniform";
    case SampleKind::RandomZipf: return "random-zipf";
  }
  return "unknown";
}

inline SampleKind parse_sample_kind(std::string_view name) {
  for (auto k : {SampleKind::Linear, SampleKind::Fibonacci, SampleKind::UniformTable2, SampleKind::ZipfTable2,
                 SampleKind::Alphabet, SampleKind::RandomUniform, SampleKind::RandomZipf})
    if (to_string(k) == name) return k;
  throw Error(Errc::InvalidArgument, "unknown sample kind '" + std::string(name) + "'");
}

struct SampleSpec {
  SampleKind kind = SampleKind::Linear;
  std::uint64_t seed = 1;
  std::size_t symbols = 8;
  std::int64_t low = 1;
  std::int64_t high = 20;
  double zipf_exponent = 1.0;
};

inline std::vector<std::string> numbered_symbols(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("s" + std::to_string(i));
  return out;
}

inline FrequencyTable fixed_sample(SampleKind kind) {
  switch (kind) {
    case SampleKind::Linear: return {numbered_symbols(8), {1, 2, 3, 4, 5, 6, 7, 8}};
    case SampleKind::Fibonacci: return {numbered_symbols(8), {1, 1, 2, 3, 5, 8, 13, 21}};
    case SampleKind::UniformTable2: return {numbered_symbols(8), {5, 6, 10, 10, 12, 17, 17, 18}};
    case SampleKind::ZipfTable2: return {numbered_symbols(8), {1, 1, 1, 1, 2, 5, 5, 14}};
    case SampleKind::Alphabet: {
      // English letter frequencies a..z
      std::vector<std::string> letters;
      for (char c = 'a'; c <= 'z'; ++c) letters.emplace_back(1, c);
      return {std::move(letters), {82, 15, 28, 43, 127, 22, 20, 61, 70, 2, 8,  40, 24,
                                   67, 75, 19, 1,  60,  63, 91, 28, 10, 24, 2, 20, 1}};
    }
    default: break;
  }
  throw Error(Errc::InvalidArgument, std::string(to_string(kind)) + " is not a fixed sample");
}

/// Produces candidate tables one after another. Fixed kinds repeat their
/// table; random kinds advance the generator.
class SampleGenerator {
 public:
  explicit SampleGenerator(SampleSpec spec) : spec_(spec), rng_(spec.seed) {
    if (spec_.symbols == 0) throw Error(Errc::EmptyAlphabet, "samples need at least one symbol");
    if (spec_.low < 1 || spec_.high < spec_.low) throw Error(Errc::InvalidArgument, "count bounds must satisfy 1 <= low <= high");
    if (spec_.kind == SampleKind::RandomZipf) build_zipf_weights();
  }

  FrequencyTable next() {
    switch (spec_.kind) {
      case SampleKind::RandomUniform:
      case SampleKind::RandomZipf: {
        std::vector<std::int64_t> counts(spec_.symbols);
        for (auto& c : counts) c = spec_.kind == SampleKind::RandomUniform ? uniform() : zipf();
        return {numbered_symbols(spec_.symbols), counts};
      }
      default: return fixed_sample(spec_.kind);
    }
  }

 private:
  std::uint64_t below(std::uint64_t range) {
    // reject the top partial block so every residue is equally likely
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
    std::uint64_t x;
    do x = rng_();
    while (x > limit);
    return x % range;
  }

  std::int64_t uniform() {
    return spec_.low + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(spec_.high - spec_.low + 1)));
  }

  void build_zipf_weights() {
    const auto n = static_cast<std::uint64_t>(spec_.high - spec_.low + 1);
    if (spec_.zipf_exponent == 1.0) {
      // exact integer weights lcm(1..n) / k
      std::uint64_t lcm = 1;
      for (std::uint64_t k = 1; k <= n; ++k) {
        lcm = std::lcm(lcm, k);
        if (lcm > (std::uint64_t{1} << 52)) break;
      }
      if (lcm <= (std::uint64_t{1} << 52)) {
        std::uint64_t acc = 0;
        for (std::uint64_t k = 1; k <= n; ++k) int_cdf_.push_back(acc += lcm / k);
        return;
      }
    }
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) real_cdf_.push_back(acc += std::pow(static_cast<double>(k), -spec_.zipf_exponent));
    for (auto& v : real_cdf_) v /= acc;
  }

  /// Rank k in 1..n with probability proportional to k^-exponent, shifted to
  /// start at `low`.
  std::int64_t zipf() {
    std::size_t idx = 0;
    if (!int_cdf_.empty()) {
      const std::uint64_t u = below(int_cdf_.back());
      while (int_cdf_[idx] <= u) ++idx;
    } else {
      const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      while (idx + 1 < real_cdf_.size() && real_cdf_[idx] <= u) ++idx;
    }
    return spec_.low + static_cast<std::int64_t>(idx);
  }

  SampleSpec spec_;
  std::mt19937_64 rng_;
  std::vector<std::uint64_t> int_cdf_;
  std::vector<double> real_cdf_;
};

/// `count` tables of the given kind. Candidates rejected by `accept` are
/// replaced by the next draw of the same generator.
inline std::vector<FrequencyTable> generate_samples(const SampleSpec& spec, std::size_t count,
                                                    const std::function<bool(const FrequencyTable&)>& accept = {}) {
  SampleGenerator gen(spec);
  std::vector<FrequencyTable> out;
  out.reserve(count);
  const bool fixed = spec.kind != SampleKind::RandomUniform && spec.kind != SampleKind::RandomZipf;
  while (out.size() < count) {
    auto ft = gen.next();
    if (!accept || accept(ft)) {
      out.push_back(std::move(ft));
    } else if (fixed) {
      throw Error(Errc::NumericalInstability, std::string(to_string(spec.kind)) + " sample was rejected");
    }
  }
  return out;
}

}  // namespace ans
