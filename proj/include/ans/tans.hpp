// SPDX-License-Identifier: Apache-2.0
#pragma once

// Tabled ANS over a periodic allocation.
//
//   C(s, n) = select(s, n + 1)             encode
//   D(n)    = (A[n], rank(A[n], n) - 1)    decode
//
// Words are encoded right to left, C(s w, n) = C(s, C(w, n)), so decoding
// yields the symbols of a word in reading order. The state is unbounded, which
// is why the default state type is an arbitrary-precision integer.

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <utility>
#include <vector>

#include "ans/core.hpp"

namespace ans {

using CodecState = boost::multiprecision::cpp_int;

template <class Int>
Int encode_symbol(const Allocation& alloc, Symbol s, const Int& n) {
  return select(alloc, s, Int(n + 1));
}

template <class Int>
std::pair<Symbol, Int> decode_symbol(const Allocation& alloc, const Int& n) {
  const Count q = alloc.period();
  const auto pos = static_cast<std::size_t>(n % q);
  const Symbol s = alloc[pos];
  const Int whole = n / q;
  return {s, Int(whole * alloc.freq().count(s) + alloc.rank_in_period(pos) - 1)};
}

template <class Int>
Int encode_word(const Allocation& alloc, std::span<const Symbol> word, Int n) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) n = encode_symbol(alloc, *it, n);
  return n;
}

template <class Int>
std::pair<std::vector<Symbol>, Int> decode_word(const Allocation& alloc, Int n, std::size_t length) {
  std::vector<Symbol> word;
  word.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    auto [s, next] = decode_symbol(alloc, n);
    word.push_back(s);
    n = std::move(next);
  }
  return {std::move(word), std::move(n)};
}

/// Bit length with the convention bits(0) = 1.
inline Count bits(const CodecState& n) {
  if (n == 0) return 1;
  return static_cast<Count>(boost::multiprecision::msb(n)) + 1;
}

inline Count bits(std::uint64_t n) {
  if (n == 0) return 1;
  return static_cast<Count>(64 - __builtin_clzll(n));
}

/// The shifted code C~(s, n) = select(s, n + 1) + 1, applied to a word from
/// state 0. This is a bijection between all words and Z>=0 with the empty
/// word mapped to 0.
template <class Int = CodecState>
Int shifted_encode(const Allocation& alloc, std::span<const Symbol> word) {
  Int n = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) n = Int(select(alloc, *it, Int(n + 1)) + 1);
  return n;
}

template <class Int>
std::vector<Symbol> shifted_decode(const Allocation& alloc, Int m) {
  std::vector<Symbol> word;
  while (m > 0) {
    auto [s, prev] = decode_symbol(alloc, Int(m - 1));
    word.push_back(s);
    m = std::move(prev);
  }
  return word;
}

}  // namespace ans
