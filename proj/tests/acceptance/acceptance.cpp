// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ans/allocators.hpp"
#include "ans/analysis.hpp"
#include "ans/evaluation.hpp"
#include "ans/markov.hpp"
#include "ans/samples.hpp"
#include "ans/stream.hpp"
#include "ans/tans.hpp"

using namespace ans;
namespace mp = boost::multiprecision;

namespace {

constexpr std::uint64_t kCorpusSeed = 1;

struct Sample {
  std::string id;
  FrequencyTable ft;
};

std::vector<Sample> build_corpus() {
  std::vector<Sample> out;
  for (SampleKind k : kTable2Kinds) out.push_back({std::string(to_string(k)), fixed_sample(k)});
  SampleSpec uni{SampleKind::RandomUniform, kCorpusSeed};
  SampleSpec zipf{SampleKind::RandomZipf, zipf_seed(kCorpusSeed)};
  int i = 0;
  for (auto& ft : generate_samples(uni, 100)) out.push_back({"uniform-" + std::to_string(i++), std::move(ft)});
  i = 0;
  for (auto& ft : generate_samples(zipf, 100)) out.push_back({"zipf-" + std::to_string(i++), std::move(ft)});
  return out;
}

// Failure log for one criterion; keeps the first few messages.
class Check {
 public:
  void fail(const std::string& what) {
    if (failures_++ < 5) notes_.push_back(what);
  }
  template <class... Parts>
  void expect(bool ok, const Parts&... parts) {
    if (ok) return;
    std::ostringstream os;
    (os << ... << parts);
    fail(os.str());
  }
  bool ok() const { return failures_ == 0; }
  std::size_t failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

int g_failed = 0;

void run(const char* name, double budget_seconds, const std::function<void(Check&)>& body) {
  Check check;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0 && secs > budget_seconds) {
    std::ostringstream os;
    os << "took " << secs << " s, budget " << budget_seconds << " s";
    check.fail(os.str());
  }
  std::printf("%s %s (%.1f s)", check.ok() ? "PASS" : "FAIL", name, secs);
  if (!check.ok()) std::printf(" %zu failure(s)", check.failures());
  std::printf("\n");
  for (const auto& n : check.notes()) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  if (!check.ok()) ++g_failed;
}

// |c_s N - Q rank(s, N-1)| over all prefixes N <= n_max, counted directly.
std::int64_t worst_prefix_deviation(const Allocation& a, Count n_max) {
  const auto& ft = a.freq();
  const auto q = static_cast<std::int64_t>(ft.period());
  std::vector<std::int64_t> seen(ft.size(), 0);
  std::int64_t worst = 0;
  for (Count n = 1; n <= n_max; ++n) {
    ++seen[a.at(n - 1)];
    for (Symbol s = 0; s < ft.size(); ++s) {
      const std::int64_t d = static_cast<std::int64_t>(ft.count(s)) * static_cast<std::int64_t>(n) - q * seen[s];
      worst = std::max(worst, d < 0 ? -d : d);
    }
  }
  return worst;
}

double collision_gap(const FrequencyTable& ft) {
  double sq = 0.0;
  for (Symbol s = 0; s < ft.size(); ++s) sq += ft.probability(s) * ft.probability(s);
  return 1.0 - sq;
}

// ------------------------------------------------------------ brute-force RE

using BigRational = mp::cpp_rational;

// n-th occurrence of s by scanning the periodic table from index 0.
mp::cpp_int scan_select(const Allocation& a, Symbol s, const mp::cpp_int& n) {
  mp::cpp_int seen = 0;
  for (std::uint64_t i = 0;; ++i)
    if (a.at(i % a.period()) == s && ++seen == n) return i;
}

BigRational brute_relative_excess(const Allocation& a, const BigRational& p) {
  const auto& ft = a.freq();
  mp::cpp_int max_code = 0, words = 0;
  std::vector<Symbol> word;
  std::function<void(const BigRational&)> walk = [&](const BigRational& prob) {
    ++words;
    mp::cpp_int code = 0;
    for (auto it = word.rbegin(); it != word.rend(); ++it) code = scan_select(a, *it, code + 1) + 1;
    max_code = std::max(max_code, code);
    for (Symbol s = 0; s < ft.size(); ++s) {
      const BigRational next = prob * BigRational(ft.count(s), ft.period());
      if (next < p) continue;
      word.push_back(s);
      walk(next);
      word.pop_back();
    }
  };
  walk(BigRational(1));
  return BigRational(max_code, words);
}

}  // namespace

int main() {
  const auto corpus = build_corpus();
  std::printf("corpus: %zu samples (5 fixed, 100 uniform seed %llu, 100 zipf)\n", corpus.size(),
              static_cast<unsigned long long>(kCorpusSeed));

  // Tables of the deadline-driven allocators, shared by several criteria.
  std::vector<std::vector<Allocation>> criteria_tables;
  for (const auto& smp : corpus) {
    std::vector<Allocation> row;
    for (Algorithm algo : kCriteriaAlgorithms) row.push_back(generate(algo, smp.ft));
    criteria_tables.push_back(std::move(row));
  }

  run("AC1 discrepancy within one", 30, [&](Check& c) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& ft = corpus[i].ft;
      for (Algorithm algo : kCriteriaAlgorithms) {
        const auto a = generate(algo, ft);
        const auto worst = worst_prefix_deviation(a, 10 * ft.period());
        c.expect(worst <= static_cast<std::int64_t>(ft.period()), corpus[i].id, " ", to_string(algo),
                 ": max |c N - Q rank| = ", worst, " > Q = ", ft.period());
      }
    }
  });

  run("AC2 criteria verification", 0, [&](Check& c) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (std::size_t k = 0; k < criteria_tables[i].size(); ++k)
        c.expect(verify_theorem_criteria(criteria_tables[i][k]), corpus[i].id, " ",
                 to_string(kCriteriaAlgorithms[k]), " fails the criteria");
    const auto t1ft = build_frequency_table({{"r", 6}, {"b", 4}, {"g", 3}, {"y", 2}});
    const std::vector<std::string> t1{"r", "b", "r", "g", "r", "b", "y", "r", "g", "b", "r", "b", "r", "g", "y"};
    c.expect(verify_theorem_criteria(validate_allocation(t1, t1ft)), "hand-made r,b,g,y allocation rejected");
    c.expect(!verify_theorem_criteria(ranged(build_frequency_table({{"a", 2}, {"b", 2}}))),
             "ranged {a:2,b:2} accepted");
  });

  run("AC3 baseline bounds", 0, [&](Check& c) {
    for (const auto& smp : corpus) {
      const auto& ft = smp.ft;
      const Count q = ft.period();
      const auto r = ranged(ft);
      const auto worst = worst_prefix_deviation(r, 10 * q);
      c.expect(2 * worst <= static_cast<std::int64_t>(q * q), smp.id, " ranged exceeds Q/2: ", worst);

      const auto d = duda(ft, DudaVariant::Half);
      const Rational inv_min(static_cast<std::int64_t>(q), static_cast<std::int64_t>(ft.min_count()));
      for (Symbol s = 0; s < ft.size(); ++s) {
        const Rational inv_f(static_cast<std::int64_t>(q), static_cast<std::int64_t>(ft.count(s)));
        const auto dev = max_occurrence_deviation(d, s, 10 * ft.count(s));
        c.expect(dev <= (inv_f + inv_min) / 2, smp.id, " duda symbol ", ft.name(s), " deviation ", dev);
      }
    }
  });

  run("AC4 codec round trips", 0, [&](Check& c) {
    std::mt19937_64 rng(20240601);
    auto uniform = [&](std::uint64_t lo, std::uint64_t hi) {
      return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
    };
    const std::vector<std::uint64_t> bases{2, 4};
    const std::vector<std::uint64_t> mults{1, 2, 4, 8};
    for (const auto& smp : corpus) {
      const auto& ft = smp.ft;
      std::vector<Allocation> tables;
      for (Algorithm algo : kAllAlgorithms) tables.push_back(generate(algo, ft));
      auto random_word = [&](std::size_t max_len) {
        std::vector<Symbol> w(uniform(0, max_len));
        for (auto& s : w) s = static_cast<Symbol>(uniform(0, ft.size() - 1));
        return w;
      };

      for (int t = 0; t < 1000; ++t) {
        const auto& a = tables[t % tables.size()];
        const auto w = random_word(32);
        const CodecState n0(uniform(0, 1000));
        const auto m = encode_word(a, std::span<const Symbol>(w), n0);
        const auto [back, n1] = decode_word(a, m, w.size());
        c.expect(back == w && n1 == n0, smp.id, " tabled round trip failed");
      }

      std::vector<StreamConfig> configs;
      for (const auto& a : tables)
        for (auto b : bases)
          for (auto k : mults) configs.emplace_back(a, b, k * ft.period());
      for (int t = 0; t < 10000; ++t) {
        const auto& cfg = configs[t % configs.size()];
        const auto w = random_word(256);
        const StreamState start{cfg.lower(), {}};
        const auto end = push_word(cfg, w, start);
        const auto [back, st] = pop_word(cfg, end, w.size());
        c.expect(back == w && st.x == cfg.lower() && st.digits.empty(), smp.id, " stream round trip failed at B=",
                 cfg.base(), " M=", cfg.lower());
      }
    }

    // Shifted code: every word of length <= 5 over four symbols.
    std::vector<FrequencyTable> quads{build_frequency_table({{"r", 6}, {"b", 4}, {"g", 3}, {"y", 2}}),
                                      build_frequency_table({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}})};
    SampleSpec four{SampleKind::RandomUniform, 77};
    four.symbols = 4;
    for (auto& ft : generate_samples(four, 4)) quads.push_back(std::move(ft));
    for (const auto& ft : quads) {
      for (Algorithm algo : kAllAlgorithms) {
        const auto a = generate(algo, ft);
        std::set<CodecState> codes;
        std::vector<Symbol> w;
        std::function<void()> all = [&] {
          const auto m = shifted_encode(a, std::span<const Symbol>(w));
          c.expect(codes.insert(m).second, "shifted code collision");
          c.expect(shifted_decode(a, m) == w, "shifted decode mismatch");
          if (w.size() == 5) return;
          for (Symbol s = 0; s < 4; ++s) {
            w.push_back(s);
            all();
            w.pop_back();
          }
        };
        all();
        c.expect(codes.size() == 1365, "expected 1365 distinct codes");
        for (std::uint64_t m = 0; m < 2000; ++m)
          c.expect(shifted_encode(a, std::span<const Symbol>(shifted_decode(a, CodecState(m)))) == m,
                   "shifted code not onto at ", m);
      }
    }
  });

  run("AC5 periodicity over three periods", 0, [&](Check& c) {
    for (const auto& smp : corpus) {
      const Count q = smp.ft.period();
      for (Algorithm algo : kCriteriaAlgorithms) {
        const auto seq = generate_sequence(algo, smp.ft, 3);
        c.expect(seq.size() == 3 * q, smp.id, " wrong length");
        for (Count n = 0; n < 2 * q && n + q < seq.size(); ++n)
          if (seq[n + q] != seq[n]) {
            c.fail(smp.id + " " + std::string(to_string(algo)) + " breaks at N=" + std::to_string(n));
            break;
          }
      }
    }
  });

  run("AC6 KL bounds", 0, [&](Check& c) {
    double lead_c = 0.0;
    {
      std::ifstream in(std::string(ANS_FIXTURE_DIR) + "/kl_constant.json");
      if (!in) throw std::runtime_error("missing kl_constant.json fixture");
      lead_c = nlohmann::json::parse(in).at("C").get<double>();
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& ft = corpus[i].ft;
      const Count q = ft.period();
      const bool fixed = i < std::size(kTable2Kinds);
      double inv_sum = 0.0, inv_sq = 0.0;
      for (Symbol s = 0; s < ft.size(); ++s) {
        inv_sum += 1.0 / ft.probability(s);
        inv_sq += 1.0 / (ft.probability(s) * ft.probability(s));
      }
      for (std::size_t k = 0; k < criteria_tables[i].size(); ++k) {
        const auto& a = criteria_tables[i][k];
        const auto tag = corpus[i].id + " " + std::string(to_string(kCriteriaAlgorithms[k]));
        c.expect(kl_divergence(a, q) == 0.0, tag, " KL at N=Q is ", kl_divergence(a, q));
        for (Count n = q / ft.min_count() + 1; n <= 10 * q; ++n) {
          const double kl = kl_divergence(a, n);
          double bound = 0.0;
          for (Symbol s = 0; s < ft.size(); ++s) {
            const double nf = static_cast<double>(n) * ft.probability(s);
            bound += ft.probability(s) * std::log(nf / (nf - 1.0));
          }
          c.expect(kl <= bound + 1e-12, tag, " N=", n, " KL ", kl, " > ", bound);
          if (fixed && n > q) {
            const double dn = static_cast<double>(n);
            const double lead = 0.5 * inv_sum + lead_c / dn * inv_sq;
            c.expect(dn * dn * kl <= lead * (1 + 1e-12), tag, " N=", n, " N^2 KL ", dn * dn * kl, " > ", lead);
          }
        }
      }
    }
  });

  run("AC7 stream analysis", 0, [&](Check& c) {
    auto check_config = [&](const std::string& tag, const StreamConfig& cfg, bool simulate) {
      const auto model = transition_matrix(cfg);
      if (simulate) {
        for (std::uint64_t x = cfg.lower(); x <= cfg.upper(); ++x) {
          std::map<std::size_t, double> row;
          for (Symbol s = 0; s < cfg.freq().size(); ++s)
            row[push_symbol(cfg, s, StreamState{x, {}}).x - cfg.lower()] += cfg.freq().probability(s);
          const auto i = x - cfg.lower();
          bool same = model.row(i).size() == row.size();
          for (const auto& e : model.row(i)) same = same && row.count(e.to) && row[e.to] == e.p;
          c.expect(same, tag, " transition row ", x, " differs from simulation");
        }
      }
      const auto p = invariant_measure(model);
      const double res = stationary_residual(model, p);
      c.expect(res <= 1e-10, tag, " residual ", res);
      const double ewl = expected_word_length(cfg, p);
      const double h = shannon_entropy(cfg.freq(), static_cast<double>(cfg.base()));
      c.expect(ewl >= h - 1e-9, tag, " EWL ", ewl, " below entropy ", h);
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& ft = corpus[i].ft;
      const bool fixed = i < std::size(kTable2Kinds);
      const auto& algos = fixed ? std::vector<Algorithm>(std::begin(kAllAlgorithms), std::end(kAllAlgorithms))
                                : std::vector<Algorithm>{Algorithm::Ranged, Algorithm::Edf, Algorithm::Greedy};
      for (Algorithm algo : algos) {
        const auto a = generate(algo, ft);
        for (std::uint64_t b : {2u, 4u})
          for (std::uint64_t k : {1u, 2u}) {
            if (!fixed && (b != 2 || k != 1)) continue;
            check_config(corpus[i].id + " " + std::string(to_string(algo)) + " B=" + std::to_string(b) +
                             " M=" + std::to_string(k) + "Q",
                         StreamConfig(a, b, k * ft.period()), true);
          }
      }
    }
    const StreamConfig ab(ranged(build_frequency_table({{"a", 1}, {"b", 1}})), 2, 2);
    const auto p = invariant_measure(transition_matrix(ab));
    c.expect(std::abs(expected_word_length(ab, p) - 1.0) <= 1e-12, "[a,b] EWL ", expected_word_length(ab, p));
    c.expect(std::abs(entropy_loss(ab, p)) <= 1e-12, "[a,b] entropy loss ", entropy_loss(ab, p));
  });

  run("AC8 expected bits envelope", 60, [&](Check& c) {
    for (SampleKind kind : {SampleKind::Linear, SampleKind::Fibonacci}) {
      const auto ft = fixed_sample(kind);
      const double h = shannon_entropy(ft, 2);
      const double gap = 1.0 / collision_gap(ft);
      for (Algorithm algo : kAllAlgorithms) {
        const auto a = generate(algo, ft);
        const double d = to_double(max_discrepancy(a, ft.period()));
        for (std::size_t m = 1; m <= 6; ++m)
          for (std::uint64_t n : {100u, 1000u, 10000u}) {
            const double md = static_cast<double>(m), nd = static_cast<double>(n);
            const double envelope = 8.0 / md + 8.0 * (d + 1.0) / (md * nd) * std::min(md, gap);
            const double eb = expected_bits(a, m, CodecState(n));
            c.expect(std::abs(eb - h) <= envelope, to_string(kind), " ", to_string(algo), " m=", m, " n=", n,
                     " |", eb, " - ", h, "| > ", envelope);
          }
      }
    }
  });

  run("AC9 relative excess against enumeration", 0, [&](Check& c) {
    const auto ft = fixed_sample(SampleKind::Linear);
    for (Algorithm algo : kAllAlgorithms) {
      const auto a = generate(algo, ft);
      for (int k = 0; k <= 6; ++k) {
        const Rational p(1, std::int64_t{1} << k);
        const auto fast = relative_excess(a, p);
        const auto slow = brute_relative_excess(a, BigRational(1, std::int64_t{1} << k));
        c.expect(BigRational(fast.numerator(), fast.denominator()) == slow, to_string(algo), " k=", k, " got ",
                 fast.numerator(), "/", fast.denominator(), " expected ", slow);
      }
    }
  });

  run("AC10 reproducible profile", 600, [&](Check& c) {
    ProfileOptions opts;
    opts.seed = kCorpusSeed;
    opts.per_kind = 100;
    opts.threads = default_threads();
    const auto first = run_profile(opts);
    const auto csv1 = profile_csv(first);
    const auto json1 = profile_records(first, opts).dump(2);
    const auto second = run_profile(opts);
    c.expect(csv1 == profile_csv(second), "CSV differs between runs");
    c.expect(json1 == profile_records(second, opts).dump(2), "records differ between runs");
    c.expect(first.curves.size() == std::size(kAllAlgorithms), "expected one curve per algorithm");
    c.expect(first.samples.size() == 200, "expected 200 evaluated samples, got ", first.samples.size());
    for (const auto& curve : first.curves) {
      c.expect(!curve.fractions.empty() && curve.fractions.back() == 1.0, curve.algorithm, " does not end at 1");
      c.expect(std::is_sorted(curve.fractions.begin(), curve.fractions.end()), curve.algorithm, " not monotone");
      c.expect(std::is_sorted(curve.thresholds.begin(), curve.thresholds.end()), curve.algorithm,
               " thresholds out of order");
    }
  });

  std::printf("%s: %d criterion/criteria failed\n", g_failed ? "FAILED" : "OK", g_failed);
  return g_failed ? 1 : 0;
}
