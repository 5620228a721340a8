#pragma once

// Line tokenizer shared by the text file readers.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tpc/error.hpp"

namespace tpc::text {

struct Line {
  std::size_t number = 0;  ///< 1-based
  std::vector<std::string_view> tokens;
};

/// Splits `text` into non-empty lines of whitespace-separated tokens with
/// `#` comments removed.
std::vector<Line> tokenize(std::string_view text);

template <typename T>
T parse_number(const Line& line, std::string_view token, const char* what) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line.number, std::string("invalid ") + what + " '" + std::string(token) + "'");
  return value;
}

}  // namespace tpc::text
