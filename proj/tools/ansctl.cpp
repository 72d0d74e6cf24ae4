// SPDX-License-Identifier: Apache-2.0
//
// ansctl: table generation, stream encode/decode, metrics and evaluation
// profiles on the command line.
//
// Exit status: 0 on success, 1 on domain or I/O errors, 2 on usage errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ans/allocators.hpp"
#include "ans/analysis.hpp"
#include "ans/evaluation.hpp"
#include "ans/io.hpp"
#include "ans/markov.hpp"
#include "ans/samples.hpp"
#include "ans/stream.hpp"

namespace {

using nlohmann::json;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << data;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ans::Error(ans::Errc::MalformedInput, "'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Doubles go out as numbers; infinities and NaN become null.
json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ans::Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    const std::int64_t num = std::stoll(text.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? text.size() : slash)) throw std::invalid_argument(text);
    std::int64_t den = 1;
    if (slash != std::string::npos) {
      den = std::stoll(text.substr(slash + 1), &used);
      if (used != text.size() - slash - 1) throw std::invalid_argument(text);
    }
    if (den == 0) throw std::invalid_argument(text);
    return {num, den};
  } catch (const std::logic_error&) {
    throw UsageError("--p expects a rational like 1/4, got '" + text + "'");
  }
}

std::string rational_text(const ans::Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---------------------------------------------------------------- gen-table

struct GenTableArgs {
  std::string algo;
  std::string counts;
  std::string symbols;
  std::string sample;
  std::uint64_t seed = 1;
  std::uint64_t base = 2;
  std::size_t max_iters = 100;
  std::string output;
};

ans::FrequencyTable table_from_args(const GenTableArgs& a) {
  if (!a.sample.empty()) {
    if (!a.counts.empty()) throw UsageError("--sample and --counts are mutually exclusive");
    ans::SampleSpec spec;
    spec.kind = ans::parse_sample_kind(a.sample);
    spec.seed = a.seed;
    return ans::SampleGenerator(spec).next();
  }
  if (a.counts.empty()) throw UsageError("either --counts or --sample is required");
  std::vector<std::int64_t> counts;
  for (const auto& c : split(a.counts, ',')) {
    try {
      std::size_t used = 0;
      counts.push_back(std::stoll(c, &used));
      if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::logic_error&) {
      throw UsageError("--counts expects comma-separated integers, got '" + c + "'");
    }
  }
  auto names = a.symbols.empty() ? ans::numbered_symbols(counts.size()) : split(a.symbols, ',');
  return ans::FrequencyTable(std::move(names), counts);
}

int run_gen_table(const GenTableArgs& a) {
  const auto algo = ans::parse_algorithm(a.algo);
  const auto ft = table_from_args(a);
  const auto alloc = ans::generate(algo, ft, ans::GenerateOptions{a.base, a.max_iters});
  json j = ans::table_to_json(alloc);
  j["algorithm"] = std::string(ans::to_string(algo));
  write_output(a.output, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------- encode / decode

struct CodecArgs {
  std::string input;
  std::string output;
  std::string table;
  std::uint64_t base = 2;
  std::uint64_t m_mult = 1;
  std::string format = "bytes";
  bool base_given = false;
  bool m_mult_given = false;
};

std::vector<ans::Symbol> parse_symbols(const ans::FrequencyTable& ft, const std::string& text,
                                       const std::string& format) {
  std::vector<ans::Symbol> word;
  if (format == "bytes") {
    word.reserve(text.size());
    for (char c : text) word.push_back(ft.index_of(std::string(1, c)));
  } else {
    std::istringstream in(text);
    for (std::string tok; in >> tok;) word.push_back(ft.index_of(tok));
  }
  return word;
}

std::string render_symbols(const ans::FrequencyTable& ft, const std::vector<ans::Symbol>& word,
                           const std::string& format) {
  std::string out;
  if (format == "bytes") {
    for (ans::Symbol s : word) out += ft.name(s);
    return out;
  }
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ' ';
    out += ft.name(word[i]);
  }
  return out + "\n";
}

void check_bytes_format(const ans::FrequencyTable& ft, const std::string& format) {
  if (format != "bytes") return;
  for (const auto& name : ft.names())
    if (name.size() != 1)
      throw ans::Error(ans::Errc::InvalidArgument,
                       "--format bytes needs single-character symbols, table has '" + name + "'");
}

int run_encode(const CodecArgs& a) {
  const auto alloc = ans::table_from_json(load_json(a.table));
  check_bytes_format(alloc.freq(), a.format);
  const auto word = parse_symbols(alloc.freq(), read_file(a.input), a.format);
  const ans::StreamConfig cfg(alloc, a.base, a.m_mult * alloc.period());
  const auto bytes = ans::serialize_message(ans::encode_message(cfg, word));
  write_output(a.output, std::string(bytes.begin(), bytes.end()));
  return 0;
}

int run_decode(const CodecArgs& a) {
  const auto alloc = ans::table_from_json(load_json(a.table));
  check_bytes_format(alloc.freq(), a.format);
  const std::string raw = read_file(a.input);
  const auto msg = ans::parse_message(std::vector<std::uint8_t>(raw.begin(), raw.end()));
  if (a.base_given && a.base != msg.base)
    throw ans::Error(ans::Errc::MalformedInput, "message uses B = " + std::to_string(msg.base));
  if (a.m_mult_given && a.m_mult * alloc.period() != msg.interval_start)
    throw ans::Error(ans::Errc::MalformedInput, "message uses M = " + std::to_string(msg.interval_start));
  const ans::StreamConfig cfg(alloc, msg.base, msg.interval_start);
  write_output(a.output, render_symbols(alloc.freq(), ans::decode_message(cfg, msg), a.format));
  return 0;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string table;
  std::string metric;
  std::optional<std::uint64_t> n_index;  // --N
  std::size_t m = 4;
  std::string n_state = "1000";  // --n, arbitrary precision
  std::string p = "1/64";
  std::uint64_t base = 2;
  std::uint64_t m_mult = 1;
  std::string output;
};

int run_analyze(const AnalyzeArgs& a) {
  const json table = load_json(a.table);
  const auto alloc = ans::table_from_json(table);
  const auto& ft = alloc.freq();
  const std::uint64_t m_start = a.m_mult * ft.period();
  json rec{{"sample", a.table},
           {"algorithm", table.contains("algorithm") ? table["algorithm"] : json(nullptr)},
           {"B", a.base},
           {"M", m_start},
           {"metric", a.metric}};

  const auto stream_measure = [&]() {
    const ans::StreamConfig cfg(alloc, a.base, m_start);
    auto model = ans::transition_matrix(cfg);
    auto p = ans::invariant_measure(model);
    return std::tuple{cfg, std::move(model), std::move(p)};
  };

  if (a.metric == "discrepancy") {
    const auto n = a.n_index.value_or(ft.period());
    const auto d = ans::max_discrepancy(alloc, n);
    rec["N"] = n;
    rec["value"] = ans::to_double(d);
    rec["exact"] = rational_text(d);
  } else if (a.metric == "kl") {
    const auto n = a.n_index.value_or(ft.period());
    rec["N"] = n;
    rec["value"] = real(ans::kl_divergence(alloc, n));
    rec["unit"] = "nats";
  } else if (a.metric == "entropy") {
    rec["value"] = ans::shannon_entropy(ft, static_cast<double>(a.base));
  } else if (a.metric == "expected-bits") {
    ans::CodecState n;
    try {
      n = ans::CodecState(a.n_state);
    } catch (const std::exception&) {
      throw UsageError("--n expects a non-negative integer, got '" + a.n_state + "'");
    }
    rec["m"] = a.m;
    rec["n"] = a.n_state;
    rec["value"] = ans::expected_bits(alloc, a.m, n);
  } else if (a.metric == "ewl") {
    const auto [cfg, model, p] = stream_measure();
    rec["value"] = ans::expected_word_length(cfg, p);
  } else if (a.metric == "entropy-loss") {
    const auto [cfg, model, p] = stream_measure();
    rec["value"] = ans::entropy_loss(cfg, p);
  } else if (a.metric == "eigen-gap") {
    const ans::StreamConfig cfg(alloc, a.base, m_start);
    rec["value"] = real(ans::eigen_gap(ans::transition_matrix(cfg)));
  } else if (a.metric == "relative-excess") {
    const auto p = parse_rational(a.p);
    const auto re = ans::relative_excess(alloc, p);
    rec["p"] = rational_text(p);
    rec["value"] = ans::to_double(re);
    rec["exact"] = rational_text(re);
  } else if (a.metric == "criteria") {
    rec["value"] = ans::verify_theorem_criteria(alloc);
  } else {
    throw UsageError("unknown metric '" + a.metric + "'");
  }
  write_output(a.output, rec.dump() + "\n");
  return 0;
}

// ------------------------------------------------------------------ samples

struct SamplesArgs {
  std::string kind;
  std::uint64_t seed = 1;
  std::size_t count = 1;
  std::size_t symbols = 8;
  double zipf_exponent = 1.0;
  std::string output;
};

int run_samples(const SamplesArgs& a) {
  ans::SampleSpec spec;
  spec.kind = ans::parse_sample_kind(a.kind);
  spec.seed = a.seed;
  spec.symbols = a.symbols;
  spec.zipf_exponent = a.zipf_exponent;
  json list = json::array();
  for (const auto& ft : ans::generate_samples(spec, a.count))
    list.push_back({{"symbols", ft.names()}, {"counts", ft.counts()}});
  const json out{{"prng", ans::kPrngName},
                 {"kind", a.kind},
                 {"seed", a.seed},
                 {"zipf_exponent", a.zipf_exponent},
                 {"samples", std::move(list)}};
  write_output(a.output, out.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ profile

struct ProfileArgs {
  ans::ProfileOptions options;
  std::string csv;
  std::string records;
};

int run_profile(ProfileArgs a) {
  const auto report = ans::run_profile(a.options);
  write_output(a.csv, ans::profile_csv(report));
  if (!a.records.empty()) write_output(a.records, ans::profile_records(report, a.options).dump(2) + "\n");
  if (report.replaced > 0)
    std::cerr << "ansctl: replaced " << report.replaced << " sample(s) whose invariant measure did not converge\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Table generation, coding and analysis for tabled and streamed ANS"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GenTableArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-table", "Generate an allocation table");
  gen_cmd->add_option("--algo", gen.algo, "ranged|duda09|duda13|edf|shifted|greedy|dube-yokoo")->required();
  gen_cmd->add_option("--counts", gen.counts, "Comma-separated positive counts");
  gen_cmd->add_option("--symbols", gen.symbols, "Comma-separated symbol names (default s0, s1, ...)");
  gen_cmd->add_option("--sample", gen.sample, "Use a built-in sample instead of --counts");
  gen_cmd->add_option("--seed", gen.seed, "Seed for random sample kinds");
  gen_cmd->add_option("--B", gen.base, "Stream base used by dube-yokoo")->check(CLI::Range(2, 255));
  gen_cmd->add_option("--max-iters", gen.max_iters, "Iteration cap for dube-yokoo")->check(CLI::PositiveNumber);
  gen_cmd->add_option("-o,--output", gen.output, "Output file (default stdout)");

  CodecArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Stream-encode a message");
  CodecArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode a stream-encoded message");
  for (auto [cmd, args] : {std::pair{enc_cmd, &enc}, std::pair{dec_cmd, &dec}}) {
    cmd->add_option("-i,--input", args->input, "Input file")->required();
    cmd->add_option("-o,--output", args->output, "Output file (default stdout)");
    cmd->add_option("--table", args->table, "Table JSON")->required();
    cmd->add_option("--B", args->base, "Renormalization base")->check(CLI::Range(2, 255));
    cmd->add_option("--M-mult", args->m_mult, "Interval start M = K * Q")->check(CLI::PositiveNumber);
    cmd->add_option("--format", args->format, "Message text format")
        ->check(CLI::IsMember({"bytes", "tokens"}));
  }

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Evaluate a metric on a table");
  an_cmd->add_option("--table", an.table, "Table JSON")->required();
  an_cmd->add_option("--metric", an.metric, "Metric name")
      ->required()
      ->check(CLI::IsMember({"discrepancy", "kl", "entropy", "expected-bits", "ewl", "entropy-loss", "eigen-gap",
                             "relative-excess", "criteria"}));
  an_cmd->add_option("--N", an.n_index, "Prefix length for discrepancy and kl (default Q)")
      ->check(CLI::PositiveNumber);
  an_cmd->add_option("--m", an.m, "Word length for expected-bits")->check(CLI::PositiveNumber);
  an_cmd->add_option("--n", an.n_state, "Initial state for expected-bits");
  an_cmd->add_option("--p", an.p, "Probability threshold for relative-excess, e.g. 1/64");
  an_cmd->add_option("--B", an.base, "Stream base")->check(CLI::Range(2, 1 << 20));
  an_cmd->add_option("--M-mult", an.m_mult, "Interval start M = K * Q")->check(CLI::PositiveNumber);
  an_cmd->add_option("-o,--output", an.output, "Output file (default stdout)");

  SamplesArgs sm;
  auto* sm_cmd = app.add_subcommand("samples", "Print sample frequency tables");
  sm_cmd->add_option("--kind", sm.kind, "linear|fibonacci|uniform-table2|zipf-table2|alphabet|random-uniform|random-zipf")
      ->required();
  sm_cmd->add_option("--seed", sm.seed, "Seed for random kinds");
  sm_cmd->add_option("--count", sm.count, "Number of tables")->check(CLI::PositiveNumber);
  sm_cmd->add_option("--n", sm.symbols, "Alphabet size for random kinds")->check(CLI::PositiveNumber);
  sm_cmd->add_option("--zipf-exponent", sm.zipf_exponent, "Zipf exponent for random-zipf")
      ->check(CLI::PositiveNumber);
  sm_cmd->add_option("-o,--output", sm.output, "Output file (default stdout)");

  ProfileArgs pr;
  pr.options.threads = ans::default_threads();
  auto* pr_cmd = app.add_subcommand("profile", "Performance profiles of entropy loss over random corpora");
  pr_cmd->add_option("--seed", pr.options.seed, "Corpus seed");
  pr_cmd->add_option("--count", pr.options.per_kind, "Samples per kind (uniform and Zipf)")
      ->check(CLI::PositiveNumber);
  pr_cmd->add_option("--n", pr.options.symbols, "Alphabet size")->check(CLI::PositiveNumber);
  pr_cmd->add_option("--zipf-exponent", pr.options.zipf_exponent, "Zipf exponent")->check(CLI::PositiveNumber);
  pr_cmd->add_option("--B", pr.options.base, "Stream base")->check(CLI::Range(2, 1 << 20));
  pr_cmd->add_option("--M-mult", pr.options.m_mult, "Interval start M = K * Q")->check(CLI::PositiveNumber);
  pr_cmd->add_option("--max-iters", pr.options.max_iters, "Iteration cap for dube-yokoo")
      ->check(CLI::PositiveNumber);
  pr_cmd->add_option("--threads", pr.options.threads, "Worker threads (default ANS_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  pr_cmd->add_option("-o,--output", pr.csv, "Profile CSV (default stdout)");
  pr_cmd->add_option("--records", pr.records, "Per-sample metric records as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  enc.base_given = enc_cmd->count("--B") > 0;
  dec.base_given = dec_cmd->count("--B") > 0;
  dec.m_mult_given = dec_cmd->count("--M-mult") > 0;

  try {
    if (*gen_cmd) return run_gen_table(gen);
    if (*enc_cmd) return run_encode(enc);
    if (*dec_cmd) return run_decode(dec);
    if (*an_cmd) return run_analyze(an);
    if (*sm_cmd) return run_samples(sm);
    if (*pr_cmd) return run_profile(pr);
  } catch (const UsageError& e) {
    std::cerr << "ansctl: " << e.what() << "\n";
    return kUsageError;
  } catch (const ans::Error& e) {
    std::cerr << "ansctl: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "ansctl: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}
