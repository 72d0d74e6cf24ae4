// SPDX-License-Identifier: Apache-2.0
#pragma once

// The stream codec with its digit stream dropped is a time-homogeneous Markov
// chain on I = [M, BM - 1]: from x, symbol s (probability f(s)) leads to the
// post-push state. This header builds that chain, finds an invariant measure
// by power iteration, and evaluates the expected number of digits emitted per
// symbol (EWL) and the second-eigenvalue statistic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "ans/analysis.hpp"
#include "ans/stream.hpp"

namespace ans {

class MarkovModel {
 public:
  struct Entry {
    std::size_t to;
    double p;
  };

  MarkovModel(std::uint64_t lower, std::uint64_t base, std::vector<std::vector<Entry>> rows)
      : lower_(lower), base_(base), rows_(std::move(rows)) {}

  /// A chain given by a dense row-stochastic matrix, with states 0..n-1.
  static MarkovModel from_dense(const std::vector<std::vector<double>>& matrix) {
    std::vector<std::vector<Entry>> rows(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
      if (matrix[i].size() != matrix.size()) throw Error(Errc::InvalidArgument, "transition matrix must be square");
      for (std::size_t j = 0; j < matrix[i].size(); ++j)
        if (matrix[i][j] != 0.0) rows[i].push_back({j, matrix[i][j]});
    }
    return MarkovModel(0, 0, std::move(rows));
  }

  std::size_t dimension() const noexcept { return rows_.size(); }
  std::uint64_t lower() const noexcept { return lower_; }
  std::uint64_t base() const noexcept { return base_; }
  const std::vector<Entry>& row(std::size_t i) const { return rows_.at(i); }

  double at(std::size_t i, std::size_t j) const {
    double v = 0.0;
    for (const auto& e : rows_.at(i))
      if (e.to == j) v += e.p;
    return v;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dimension(), dimension());
    for (std::size_t i = 0; i < dimension(); ++i)
      for (const auto& e : rows_[i]) m(i, e.to) += e.p;
    return m;
  }

  /// q = p P.
  std::vector<double> step(const std::vector<double>& p) const {
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double pi = p[i];
      if (pi == 0.0) continue;
      for (const auto& e : rows_[i]) q[e.to] += pi * e.p;
    }
    return q;
  }

 private:
  std::uint64_t lower_;
  std::uint64_t base_;
  std::vector<std::vector<Entry>> rows_;
};

/// lambda_s = ceil(-log_B f(s)) and the state M f(s) B^lambda_s at and above
/// which a push of s strips lambda_s digits instead of lambda_s - 1.
struct DigitThreshold {
  std::uint64_t lambda = 0;
  std::uint64_t threshold = 0;
};

inline DigitThreshold digit_threshold(const StreamConfig& cfg, Symbol s) {
  const auto& ft = cfg.freq();
  DigitThreshold out;
  // smallest lambda with c_s B^lambda >= Q
  unsigned __int128 scaled = ft.count(s);
  std::uint64_t threshold = cfg.symbol_lower(s);
  while (scaled < ft.period()) {
    scaled *= cfg.base();
    threshold *= cfg.base();
    ++out.lambda;
  }
  out.threshold = threshold;
  return out;
}

inline MarkovModel transition_matrix(const StreamConfig& cfg) {
  const auto& ft = cfg.freq();
  const std::uint64_t m = cfg.lower();
  const std::uint64_t b = cfg.base();
  std::vector<DigitThreshold> thresholds;
  std::vector<std::uint64_t> strip_low;  // B^(lambda - 1), the divisor below the threshold
  for (Symbol s = 0; s < ft.size(); ++s) {
    thresholds.push_back(digit_threshold(cfg, s));
    std::uint64_t pw = 1;
    for (std::uint64_t i = 1; i < thresholds.back().lambda; ++i) pw *= b;
    strip_low.push_back(pw);
  }
  std::vector<std::vector<MarkovModel::Entry>> rows(cfg.interval_size());
  for (std::uint64_t x = m; x <= cfg.upper(); ++x) {
    auto& row = rows[x - m];
    for (Symbol s = 0; s < ft.size(); ++s) {
      const auto& th = thresholds[s];
      std::uint64_t reduced = x;
      if (th.lambda > 0) {
        reduced = x / strip_low[s];
        if (x >= th.threshold) reduced /= b;
      }
      const std::uint64_t next = encode_symbol(cfg.alloc(), s, reduced);
      const std::size_t to = next - m;
      auto it = std::find_if(row.begin(), row.end(), [to](const auto& e) { return e.to == to; });
      if (it == row.end())
        row.push_back({to, ft.probability(s)});
      else
        it->p += ft.probability(s);
    }
  }
  return MarkovModel(m, b, std::move(rows));
}

inline double stationary_residual(const MarkovModel& model, const std::vector<double>& p) {
  const auto q = model.step(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(q[i] - p[i]));
  return worst;
}

/// Power iteration from the uniform distribution, undamped. Returns the first
/// iterate p with ||pP - p||_inf <= tolerance. For reducible chains this picks
/// one particular invariant measure; periodic chains never converge and
/// report NumericalInstability.
inline std::vector<double> invariant_measure(const MarkovModel& model, double tolerance = 1e-10,
                                             std::size_t max_iterations = 1'000'000) {
  const std::size_t n = model.dimension();
  if (n == 0) throw Error(Errc::InvalidArgument, "empty chain");
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < max_iterations; ++it) {
    auto q = model.step(p);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(q[i] - p[i]));
    if (!std::isfinite(residual)) break;
    if (residual <= tolerance) return p;
    p = std::move(q);
  }
  throw Error(Errc::NumericalInstability, "power iteration did not reach the residual tolerance");
}

/// Expected number of base-B digits emitted per encoded symbol when the
/// state is distributed according to `p` over I.
inline double expected_word_length(const StreamConfig& cfg, const std::vector<double>& p) {
  if (p.size() != cfg.interval_size()) throw Error(Errc::InvalidArgument, "measure must cover I");
  std::vector<double> prefix(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) prefix[i + 1] = prefix[i] + p[i];
  const auto& ft = cfg.freq();
  double ewl = 0.0;
  for (Symbol s = 0; s < ft.size(); ++s) {
    const auto th = digit_threshold(cfg, s);
    const std::size_t split = th.threshold - cfg.lower();
    const double below = prefix[split];
    const double above = prefix[p.size()] - prefix[split];
    const auto lambda = static_cast<double>(th.lambda);
    ewl += ft.probability(s) * ((lambda - 1.0) * below + lambda * above);
  }
  return ewl;
}

/// EWL minus the base-B Shannon entropy.
inline double entropy_loss(const StreamConfig& cfg, const std::vector<double>& p) {
  return expected_word_length(cfg, p) - shannon_entropy(cfg.freq(), static_cast<double>(cfg.base()));
}

/// Dense eigensolves are refused above this dimension.
inline constexpr std::size_t kMaxDenseDimension = 4096;

/// Eigenvalue moduli of the transition matrix, largest first.
inline std::vector<double> spectrum_moduli(const MarkovModel& model) {
  if (model.dimension() > kMaxDenseDimension)
    throw Error(Errc::EnumerationTooLarge, "chain too large for a dense eigensolve");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(model.dense(), false);
  if (solver.info() != Eigen::Success) throw Error(Errc::NumericalInstability, "eigensolver failed");
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) moduli.push_back(std::abs(solver.eigenvalues()(i)));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli;
}

/// log10(lambda_1 / |lambda_2|) with lambda_1 = 1. +inf when |lambda_2| <= 1e-14.
inline double eigen_gap(const MarkovModel& model) {
  if (model.dimension() > kMaxDenseDimension)
    throw Error(Errc::EnumerationTooLarge, "chain too large for a dense eigensolve");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(model.dense(), false);
  if (solver.info() != Eigen::Success) throw Error(Errc::NumericalInstability, "eigensolver failed");
  const auto& values = solver.eigenvalues();
  Eigen::Index leading = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (std::abs(values(i) - 1.0) < std::abs(values(leading) - 1.0)) leading = i;
  if (std::abs(values(leading) - 1.0) > 1e-9)
    throw Error(Errc::NumericalInstability, "no eigenvalue within 1e-9 of 1");
  double second = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (i != leading) second = std::max(second, std::abs(values(i)));
  if (second <= 1e-14) return std::numeric_limits<double>::infinity();
  return std::log10(1.0 / second);
}

}  // namespace ans
