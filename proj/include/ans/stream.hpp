// SPDX-License-Identifier: Apache-2.0
#pragma once

// Streamed ANS: the state is kept in the B-absorbing interval I = [M, BM - 1]
// by moving base-B digits to and from a digit stream.
//
// Encoding a symbol s from x strips the least significant digits of x until
// it lands in I_s = [M f(s), B M f(s) - 1]; the stripped block b_1 ... b_l
// (most significant first) is prepended to the stream. Decoding consumes
// digits from the stream front. Encoding and decoding are exact mirrors, so
// the stream behaves as a stack.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ans/core.hpp"
#include "ans/tans.hpp"

namespace ans {

using Digit = std::uint32_t;

class DigitStream {
 public:
  DigitStream() = default;

  static DigitStream from_front_to_back(std::span<const Digit> digits) {
    DigitStream out;
    out.rev_.assign(digits.rbegin(), digits.rend());
    return out;
  }

  std::vector<Digit> front_to_back() const { return {rev_.rbegin(), rev_.rend()}; }

  std::size_t size() const noexcept { return rev_.size(); }
  bool empty() const noexcept { return rev_.empty(); }
  Digit front() const { return rev_.back(); }

  void push_front(Digit d) { rev_.push_back(d); }
  Digit pop_front() {
    const Digit d = rev_.back();
    rev_.pop_back();
    return d;
  }

  friend bool operator==(const DigitStream&, const DigitStream&) = default;

 private:
  // Stored back to front so both ends used by the codec are O(1).
  std::vector<Digit> rev_;
};

struct StreamState {
  std::uint64_t x = 0;
  DigitStream digits;

  friend bool operator==(const StreamState&, const StreamState&) = default;
};

class StreamConfig {
 public:
  /// Largest accepted B * M; keeps m * B + digit and select() results far
  /// from the 64-bit limit.
  static constexpr std::uint64_t kMaxSpan = std::uint64_t{1} << 62;

  StreamConfig(Allocation alloc, std::uint64_t base, std::uint64_t interval_start)
      : alloc_(std::move(alloc)), base_(base), lower_(interval_start) {
    if (base_ < 2) throw Error(Errc::BaseTooSmall, "renormalization base must be >= 2");
    if (lower_ == 0 || lower_ % alloc_.period() != 0)
      throw Error(Errc::PeriodDoesNotDivide, "interval start " + std::to_string(lower_) +
                                                 " is not a positive multiple of the table length " +
                                                 std::to_string(alloc_.period()));
    if (lower_ > kMaxSpan / base_) throw Error(Errc::Overflow, "B * M exceeds 2^62");
    const std::uint64_t scale = lower_ / alloc_.period();
    sub_lower_.reserve(alloc_.freq().size());
    for (Symbol s = 0; s < alloc_.freq().size(); ++s) sub_lower_.push_back(scale * alloc_.freq().count(s));
  }

  const Allocation& alloc() const noexcept { return alloc_; }
  const FrequencyTable& freq() const noexcept { return alloc_.freq(); }
  std::uint64_t base() const noexcept { return base_; }
  /// M, the first state of I.
  std::uint64_t lower() const noexcept { return lower_; }
  /// BM - 1, the last state of I.
  std::uint64_t upper() const noexcept { return base_ * lower_ - 1; }
  std::uint64_t interval_size() const noexcept { return (base_ - 1) * lower_; }

  /// M f(s), the first state of I_s.
  std::uint64_t symbol_lower(Symbol s) const { return sub_lower_.at(s); }
  /// B M f(s) - 1, the last state of I_s.
  std::uint64_t symbol_upper(Symbol s) const { return base_ * sub_lower_.at(s) - 1; }

  bool contains(std::uint64_t x) const noexcept { return x >= lower_ && x <= upper(); }

 private:
  Allocation alloc_;
  std::uint64_t base_;
  std::uint64_t lower_;
  std::vector<std::uint64_t> sub_lower_;
};

inline StreamConfig make_config(const Allocation& alloc, std::uint64_t base, std::uint64_t interval_start) {
  return StreamConfig(alloc, base, interval_start);
}

inline StreamState push_symbol(const StreamConfig& cfg, Symbol s, StreamState st) {
  cfg.freq().check(s);
  if (!cfg.contains(st.x))
    throw Error(Errc::StateOutOfInterval, "state " + std::to_string(st.x) + " is outside I");
  const std::uint64_t hi = cfg.symbol_upper(s);
  const std::uint64_t b = cfg.base();
  std::uint64_t x = st.x;
  while (x > hi) {
    // least significant digit first; each lands in front of the previous one
    st.digits.push_front(static_cast<Digit>(x % b));
    x /= b;
  }
  st.x = encode_symbol(cfg.alloc(), s, x);
  return st;
}

inline std::pair<Symbol, StreamState> pop_symbol(const StreamConfig& cfg, StreamState st) {
  if (!cfg.contains(st.x))
    throw Error(Errc::StateOutOfInterval, "state " + std::to_string(st.x) + " is outside I");
  auto [s, m] = decode_symbol(cfg.alloc(), st.x);
  while (m < cfg.lower()) {
    if (st.digits.empty())
      throw Error(Errc::StreamExhausted, "digit stream ran out before the state returned to I");
    m = m * cfg.base() + st.digits.pop_front();
  }
  st.x = m;
  return {s, std::move(st)};
}

inline StreamState push_word(const StreamConfig& cfg, std::span<const Symbol> word, StreamState st) {
  for (Symbol s : word) st = push_symbol(cfg, s, std::move(st));
  return st;
}

/// Pops `length` symbols and returns them in the order they were pushed.
inline std::pair<std::vector<Symbol>, StreamState> pop_word(const StreamConfig& cfg, StreamState st,
                                                            std::size_t length) {
  std::vector<Symbol> word(length);
  for (std::size_t i = length; i-- > 0;) {
    auto [s, next] = pop_symbol(cfg, std::move(st));
    word[i] = s;
    st = std::move(next);
  }
  return {std::move(word), std::move(st)};
}

}  // namespace ans
