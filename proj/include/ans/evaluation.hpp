// SPDX-License-Identifier: Apache-2.0
#pragma once

// Stream-codec evaluation over random corpora: every algorithm builds a table
// for each sample, the table drives a stream codec with B and M = K Q, and
// the entropy loss relative to the base-B Shannon entropy is collected into
// performance profiles.
//
// Samples whose invariant measure cannot be computed (for any algorithm) are
// dropped and replaced by the next draw of the same generator, so the
// accepted corpus depends only on the options, never on thread count.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ans/allocators.hpp"
#include "ans/analysis.hpp"
#include "ans/markov.hpp"
#include "ans/samples.hpp"

namespace ans {

struct ProfileOptions {
  std::uint64_t seed = 1;
  std::size_t per_kind = 100;
  std::uint64_t base = 2;
  std::uint64_t m_mult = 1;
  std::size_t symbols = 8;
  double zipf_exponent = 1.0;
  std::size_t max_iters = 100;
  std::size_t threads = 1;
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
};

struct SampleEvaluation {
  std::string id;
  FrequencyTable freq;
  double entropy = 0.0;  // base B
  std::vector<double> ewl;
  std::vector<double> loss;
  std::vector<double> quotient;
};

/// Evaluates every requested algorithm on one sample, or returns nullopt if
/// some invariant measure failed to converge.
inline std::optional<SampleEvaluation> evaluate_sample(const std::string& id, const FrequencyTable& ft,
                                                       const ProfileOptions& opts) {
  SampleEvaluation out{id, ft, shannon_entropy(ft, static_cast<double>(opts.base)), {}, {}, {}};
  try {
    for (Algorithm algo : opts.algorithms) {
      const Allocation alloc = generate(algo, ft, GenerateOptions{opts.base, opts.max_iters});
      const StreamConfig cfg(alloc, opts.base, opts.m_mult * ft.period());
      const auto p = invariant_measure(transition_matrix(cfg));
      const double ewl = expected_word_length(cfg, p);
      out.ewl.push_back(ewl);
      out.loss.push_back(ewl - out.entropy);
      out.quotient.push_back((ewl - out.entropy) / out.entropy);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::NumericalInstability) return std::nullopt;
    throw;
  }
  return out;
}

struct ProfileReport {
  std::vector<std::string> algorithms;
  std::vector<SampleEvaluation> samples;
  std::vector<ProfileCurve> curves;
  std::size_t replaced = 0;
};

/// Worker count from ANS_THREADS, defaulting to the hardware concurrency.
inline std::size_t default_threads() {
  if (const char* env = std::getenv("ANS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::uint64_t zipf_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

namespace detail {

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

inline ProfileReport run_profile(const ProfileOptions& opts) {
  ProfileReport report;
  for (Algorithm a : opts.algorithms) report.algorithms.emplace_back(to_string(a));

  for (SampleKind kind : {SampleKind::RandomUniform, SampleKind::RandomZipf}) {
    SampleSpec spec;
    spec.kind = kind;
    spec.seed = kind == SampleKind::RandomUniform ? opts.seed : zipf_seed(opts.seed);
    spec.symbols = opts.symbols;
    spec.zipf_exponent = opts.zipf_exponent;
    SampleGenerator gen(spec);
    std::size_t accepted = 0;
    std::size_t drawn = 0;
    const std::size_t batch = std::max<std::size_t>(opts.threads, 1);
    while (accepted < opts.per_kind) {
      std::vector<FrequencyTable> candidates;
      for (std::size_t i = 0; i < batch; ++i) candidates.push_back(gen.next());
      std::vector<std::optional<SampleEvaluation>> results(candidates.size());
      detail::parallel_for(candidates.size(), opts.threads, [&](std::size_t i) {
        results[i] = evaluate_sample(std::string(to_string(kind)) + "/" + std::to_string(drawn + i), candidates[i],
                                     opts);
      });
      drawn += candidates.size();
      for (auto& r : results) {
        if (accepted == opts.per_kind) break;
        if (r) {
          report.samples.push_back(std::move(*r));
          ++accepted;
        } else {
          ++report.replaced;
        }
      }
    }
  }

  std::vector<std::vector<double>> quotients(opts.algorithms.size());
  std::vector<double> thresholds;
  for (const auto& s : report.samples) {
    for (std::size_t a = 0; a < s.quotient.size(); ++a) {
      quotients[a].push_back(s.quotient[a]);
      thresholds.push_back(s.quotient[a]);
    }
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  report.curves = performance_profile(report.algorithms, quotients, thresholds);
  return report;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One row per threshold: `threshold,<algo>...` with ECDF fractions.
inline std::string profile_csv(const ProfileReport& report) {
  std::string out = "threshold";
  for (const auto& a : report.algorithms) out += "," + a;
  out += "\n";
  const std::size_t rows = report.curves.empty() ? 0 : report.curves.front().thresholds.size();
  for (std::size_t r = 0; r < rows; ++r) {
    out += format_real(report.curves.front().thresholds[r]);
    for (const auto& c : report.curves) out += "," + format_real(c.fractions[r]);
    out += "\n";
  }
  return out;
}

/// Per-sample metric records plus the metadata needed to regenerate them.
inline nlohmann::json profile_records(const ProfileReport& report, const ProfileOptions& opts) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& s : report.samples) {
    const std::uint64_t m = opts.m_mult * s.freq.period();
    for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
      for (const auto& [metric, value] : {std::pair{"ewl", s.ewl[a]}, std::pair{"entropy_loss", s.loss[a]},
                                          std::pair{"loss_over_entropy", s.quotient[a]}}) {
        records.push_back({{"sample", s.id},
                           {"algorithm", report.algorithms[a]},
                           {"B", opts.base},
                           {"M", m},
                           {"metric", metric},
                           {"value", value}});
      }
    }
  }
  return {{"prng", kPrngName},
          {"seed_uniform", opts.seed},
          {"seed_zipf", zipf_seed(opts.seed)},
          {"per_kind", opts.per_kind},
          {"zipf_exponent", opts.zipf_exponent},
          {"M_mult", opts.m_mult},
          {"replaced", report.replaced},
          {"records", std::move(records)}};
}

}  // namespace ans
