// SPDX-License-Identifier: Apache-2.0
#pragma once

// Interchange formats.
//
// Table JSON:
//   {"symbols": [...], "counts": [...], "allocation": [...]}
// where `allocation` lists one period of symbol names.
//
// Message file (stream codec output), all integers little-endian:
//   "ANS1" | B: u8 | M: u64 | symbol count: u64 | final state: u64 |
//   digit count: u64 | digits
// Digits are packed k = floor(8 / ceil(log2 B)) per byte, each in
// ceil(log2 B) bits, left-aligned: the front digit of the stream occupies the
// most significant bits of byte 0. Unused low bits of the last byte are zero.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ans/core.hpp"
#include "ans/stream.hpp"

namespace ans {

inline nlohmann::json table_to_json(const Allocation& alloc) {
  const auto& ft = alloc.freq();
  return {{"symbols", ft.names()}, {"counts", ft.counts()}, {"allocation", alloc.names()}};
}

inline FrequencyTable frequency_table_from_json(const nlohmann::json& j) {
  try {
    return FrequencyTable(j.at("symbols").get<std::vector<std::string>>(),
                          j.at("counts").get<std::vector<std::int64_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedInput, std::string("table JSON: ") + e.what());
  }
}

inline Allocation table_from_json(const nlohmann::json& j) {
  const FrequencyTable ft = frequency_table_from_json(j);
  std::vector<std::string> allocation;
  try {
    allocation = j.at("allocation").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedInput, std::string("table JSON: ") + e.what());
  }
  return validate_allocation(allocation, ft);
}

struct Message {
  std::uint8_t base = 2;
  std::uint64_t interval_start = 0;
  std::uint64_t symbol_count = 0;
  std::uint64_t state = 0;
  std::vector<Digit> digits;  // front to back

  friend bool operator==(const Message&, const Message&) = default;
};

inline constexpr std::array<std::uint8_t, 4> kMessageMagic = {'A', 'N', 'S', '1'};

/// ceil(log2 B), the width of one packed digit.
inline unsigned digit_width(unsigned base) {
  unsigned w = 0;
  while ((1u << w) < base) ++w;
  return w;
}

namespace detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_message(const Message& msg) {
  if (msg.base < 2) throw Error(Errc::BaseTooSmall, "message base must be >= 2");
  const unsigned width = digit_width(msg.base);
  const unsigned per_byte = 8 / width;
  std::vector<std::uint8_t> out(kMessageMagic.begin(), kMessageMagic.end());
  out.push_back(msg.base);
  detail::put_u64(out, msg.interval_start);
  detail::put_u64(out, msg.symbol_count);
  detail::put_u64(out, msg.state);
  detail::put_u64(out, msg.digits.size());
  for (std::size_t i = 0; i < msg.digits.size(); i += per_byte) {
    std::uint8_t byte = 0;
    for (unsigned j = 0; j < per_byte && i + j < msg.digits.size(); ++j) {
      const Digit d = msg.digits[i + j];
      if (d >= msg.base) throw Error(Errc::InvalidArgument, "digit out of range for the base");
      byte |= static_cast<std::uint8_t>(d << (8 - width * (j + 1)));
    }
    out.push_back(byte);
  }
  return out;
}

inline Message parse_message(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t header = 4 + 1 + 4 * 8;
  if (bytes.size() < header) throw Error(Errc::MalformedInput, "message shorter than its header");
  if (!std::equal(kMessageMagic.begin(), kMessageMagic.end(), bytes.begin()))
    throw Error(Errc::MalformedInput, "bad magic, expected ANS1");
  Message msg;
  msg.base = bytes[4];
  if (msg.base < 2) throw Error(Errc::BaseTooSmall, "message base must be >= 2");
  msg.interval_start = detail::get_u64(bytes, 5);
  msg.symbol_count = detail::get_u64(bytes, 13);
  msg.state = detail::get_u64(bytes, 21);
  const std::uint64_t count = detail::get_u64(bytes, 29);
  const unsigned width = digit_width(msg.base);
  const unsigned per_byte = 8 / width;
  const std::uint64_t body = bytes.size() - header;
  if (count > body * per_byte || (count + per_byte - 1) / per_byte != body)
    throw Error(Errc::MalformedInput, "digit count does not match the payload length");
  msg.digits.reserve(count);
  const std::uint8_t mask = static_cast<std::uint8_t>((1u << width) - 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint8_t byte = bytes[header + i / per_byte];
    const auto j = static_cast<unsigned>(i % per_byte);
    const Digit d = (byte >> (8 - width * (j + 1))) & mask;
    if (d >= msg.base) throw Error(Errc::MalformedInput, "digit out of range for the base");
    msg.digits.push_back(d);
  }
  return msg;
}

/// Encodes `word` from the initial state M and packages the result.
inline Message encode_message(const StreamConfig& cfg, std::span<const Symbol> word) {
  if (cfg.base() > 255) throw Error(Errc::InvalidArgument, "message files store B in one byte");
  const StreamState end = push_word(cfg, word, StreamState{cfg.lower(), {}});
  return {static_cast<std::uint8_t>(cfg.base()), cfg.lower(), word.size(), end.x, end.digits.front_to_back()};
}

/// Inverse of encode_message. The decoder must finish in the initial state
/// with the stream fully consumed, otherwise the message is rejected.
inline std::vector<Symbol> decode_message(const StreamConfig& cfg, const Message& msg) {
  if (msg.base != cfg.base() || msg.interval_start != cfg.lower())
    throw Error(Errc::MalformedInput, "message was written for a different B or M");
  if (msg.symbol_count > (std::uint64_t{1} << 32)) throw Error(Errc::MalformedInput, "implausible symbol count");
  auto [word, end] = pop_word(cfg, StreamState{msg.state, DigitStream::from_front_to_back(msg.digits)},
                              static_cast<std::size_t>(msg.symbol_count));
  if (end.x != cfg.lower() || !end.digits.empty())
    throw Error(Errc::MalformedInput, "message did not decode back to the initial state");
  return word;
}

}  // namespace ans
