/*
 * Copyright 2026 The Eclipse Detector Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ECLIPSE_TEXT_HPP_
#define ECLIPSE_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace eclipse::text {

// A number as it appears in text, e.g. "$81.8B", "12.3%", "1,234",
// "$211 billion". Offsets cover the whole span including currency sign and
// suffix.
struct NumericMention {
  std::size_t begin = 0;
  std::size_t end = 0;
  double magnitude = 0.0;  // as written: 81.8 for "$81.8B"
  double scale = 1.0;      // 1e9 for "B" / "billion"
  int decimals = 0;        // digits after the decimal point
  bool grouped = false;    // thousands separators present
  bool currency = false;   // leading '$'
  bool percent = false;
  std::string suffix;      // exactly as written, including a leading space
  bool is_year = false;    // bare integer in [1900, 2100]

  double value() const { return magnitude * scale; }
  // "USD", "%" or "" (plain count).
  std::string unit() const;
};

std::vector<NumericMention> FindNumerics(std::string_view text);

// Renders `magnitude` in the style of `style` (currency sign, grouping,
// suffix) with the given number of decimals.
std::string FormatLike(const NumericMention& style, double magnitude,
                       int decimals);

// Rounds to `digits` significant figures; zero stays zero.
double RoundSignificant(double v, int digits = 3);

// Compact rendering of an already-scaled value with K/M/B/T suffix:
// 2.11e11 -> "211B", 8.18e10 -> "81.8B". Percentages render as "12.3%".
std::string CompactValue(double value, bool percent);

enum class TokenKind { kWord, kNumber, kPossessive, kPunct };

struct Token {
  TokenKind kind = TokenKind::kWord;
  std::string text;
  std::string lower;
  std::size_t begin = 0;
  std::size_t end = 0;
  int numeric = -1;  // index into the mention list for kNumber
  bool sentence_end = false;
};

struct TokenizedText {
  std::vector<Token> tokens;
  std::vector<NumericMention> numerics;
};

TokenizedText Tokenize(std::string_view text);

std::string ToLower(std::string_view s);
std::string Trim(std::string_view s);
// Lower-cases and collapses runs of whitespace.
std::string NormalizeForMatch(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);

// Replaces [begin, end) of `s` with `replacement`.
std::string Splice(std::string_view s, std::size_t begin, std::size_t end,
                   std::string_view replacement);

}  // namespace eclipse::text

#endif  // ECLIPSE_TEXT_HPP_
