// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ans {

enum class Errc {
  EmptyAlphabet,
  NonPositiveCount,
  DuplicateSymbol,
  UnknownSymbol,
  NonPositiveOrdinal,
  LengthMismatch,
  CountMismatch,
  BaseTooSmall,
  PeriodDoesNotDivide,
  Overflow,
  StateOutOfInterval,
  StreamExhausted,
  NumericalInstability,
  EnumerationTooLarge,
  InvalidArgument,
  MalformedInput,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyAlphabet: return "EmptyAlphabet";
    case Errc::NonPositiveCount: return "NonPositiveCount";
    case Errc::DuplicateSymbol: return "DuplicateSymbol";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::NonPositiveOrdinal: return "NonPositiveOrdinal";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::BaseTooSmall: return "BaseTooSmall";
    case Errc::PeriodDoesNotDivide: return "PeriodDoesNotDivide";
    case Errc::Overflow: return "Overflow";
    case Errc::StateOutOfInterval: return "StateOutOfInterval";
    case Errc::StreamExhausted: return "StreamExhausted";
    case Errc::NumericalInstability: return "NumericalInstability";
    case Errc::EnumerationTooLarge: return "EnumerationTooLarge";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Domain error raised by every operation in the library. The code is stable
/// and is what callers (and tests) should dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ans
