// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "ans/core.hpp"
#include "ans/error.hpp"

namespace ans::testing {

inline FrequencyTable table1_freq() { return build_frequency_table({{"r", 6}, {"b", 4}, {"g", 3}, {"y", 2}}); }

inline Allocation table1() {
  return validate_allocation({"r", "b", "r", "g", "r", "b", "y", "r", "g", "b", "r", "b", "r", "g", "y"}, table1_freq());
}

inline FrequencyTable ab_freq() { return build_frequency_table({{"a", 1}, {"b", 1}}); }
inline Allocation ab() { return validate_allocation({"a", "b"}, ab_freq()); }

inline std::vector<Symbol> word(const Allocation& alloc, const std::string& letters) {
  std::vector<Symbol> out;
  for (char c : letters) out.push_back(alloc.freq().index_of(std::string(1, c)));
  return out;
}

inline std::string letters(const Allocation& alloc, const std::vector<Symbol>& w) {
  std::string out;
  for (Symbol s : w) out += alloc.freq().name(s);
  return out;
}

}  // namespace ans::testing

#define EXPECT_ANS_ERROR(stmt, errc)                                        \
  do {                                                                      \
    try {                                                                   \
      stmt;                                                                 \
      ADD_FAILURE() << "expected " << ::ans::to_string(errc);               \
    } catch (const ::ans::Error& e) {                                       \
      EXPECT_EQ(e.code(), errc) << e.what();                                \
    }                                                                       \
  } while (0)
