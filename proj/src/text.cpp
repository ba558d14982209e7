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

#include "eclipse/text.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>

namespace eclipse::text {
namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool IsAlnum(char c) { return IsDigit(c) || IsAlpha(c); }

struct ScaleWord {
  std::string_view word;
  double scale;
};
constexpr std::array<ScaleWord, 4> kScaleWords = {{
    {"thousand", 1e3}, {"million", 1e6}, {"billion", 1e9}, {"trillion", 1e12}}};

double LetterScale(char c) {
  switch (c) {
    case 'K': case 'k': return 1e3;
    case 'M': case 'm': return 1e6;
    case 'B': case 'b': return 1e9;
    case 'T': case 't': return 1e12;
    default: return 0.0;
  }
}

bool MatchWordAt(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) {
      return false;
    }
  }
  const std::size_t after = pos + word.size();
  return after == text.size() || !IsAlnum(text[after]);
}

// Parses a number starting at `pos` (which is '$' or a digit). Returns false
// when the text at `pos` is not a standalone numeric mention.
bool ParseNumberAt(std::string_view text, std::size_t pos, NumericMention* out) {
  NumericMention m;
  m.begin = pos;
  std::size_t i = pos;
  if (text[i] == '$') {
    m.currency = true;
    ++i;
  }
  if (i >= text.size() || !IsDigit(text[i])) return false;

  std::string digits;
  std::size_t run = 0;
  while (i < text.size() && IsDigit(text[i])) {
    digits.push_back(text[i]);
    ++i;
    ++run;
  }
  // Thousands groups: only when the leading run is 1-3 digits and every group
  // is exactly three digits.
  if (run <= 3) {
    while (i + 3 < text.size() && text[i] == ',' && IsDigit(text[i + 1]) &&
           IsDigit(text[i + 2]) && IsDigit(text[i + 3]) &&
           (i + 4 >= text.size() || !IsDigit(text[i + 4]))) {
      digits.append(text.substr(i + 1, 3));
      m.grouped = true;
      i += 4;
    }
  }
  std::string fraction;
  if (i + 1 < text.size() && text[i] == '.' && IsDigit(text[i + 1])) {
    ++i;
    while (i < text.size() && IsDigit(text[i])) {
      fraction.push_back(text[i]);
      ++i;
    }
  }
  m.decimals = static_cast<int>(fraction.size());
  m.magnitude = std::stod(fraction.empty() ? digits : digits + "." + fraction);

  // Suffix.
  std::size_t suffix_begin = i;
  if (i < text.size() && text[i] == '%') {
    m.percent = true;
    ++i;
  } else if (i < text.size() && LetterScale(text[i]) != 0.0 &&
             (i + 1 >= text.size() || !IsAlnum(text[i + 1]))) {
    m.scale = LetterScale(text[i]);
    ++i;
  } else {
    std::size_t j = i;
    if (j < text.size() && text[j] == ' ') ++j;
    bool matched = false;
    for (const auto& sw : kScaleWords) {
      if (MatchWordAt(text, j, sw.word)) {
        m.scale = sw.scale;
        i = j + sw.word.size();
        matched = true;
        break;
      }
    }
    if (!matched && MatchWordAt(text, j, "percent")) {
      m.percent = true;
      i = j + 7;
      matched = true;
    }
    if (!matched && i < text.size() && IsAlpha(text[i])) {
      return false;  // "10-K" style identifiers are fine, "3rd" / "5x" are not
    }
  }
  m.suffix = std::string(text.substr(suffix_begin, i - suffix_begin));
  m.end = i;
  m.is_year = !m.currency && !m.percent && m.scale == 1.0 && !m.grouped &&
              m.decimals == 0 && digits.size() == 4 && m.magnitude >= 1900 &&
              m.magnitude <= 2100;
  *out = std::move(m);
  return true;
}

}  // namespace

std::string NumericMention::unit() const {
  if (percent) return "%";
  if (currency) return "USD";
  return "";
}

std::vector<NumericMention> FindNumerics(std::string_view text) {
  std::vector<NumericMention> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const bool starts = c == '$' ? (i + 1 < text.size() && IsDigit(text[i + 1]))
                                 : IsDigit(c);
    const bool boundary =
        i == 0 || !(IsAlnum(text[i - 1]) || text[i - 1] == '.' ||
                    text[i - 1] == ',' || text[i - 1] == '$');
    if (starts && boundary) {
      NumericMention m;
      if (ParseNumberAt(text, i, &m)) {
        i = m.end;
        out.push_back(std::move(m));
        continue;
      }
      // Skip the rest of the alphanumeric run.
      while (i < text.size() && (IsAlnum(text[i]) || text[i] == '$')) ++i;
      continue;
    }
    ++i;
  }
  return out;
}

std::string FormatLike(const NumericMention& style, double magnitude,
                       int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, std::fabs(magnitude));
  std::string body(buf);
  if (style.grouped) {
    const std::size_t dot = body.find('.');
    std::string int_part = body.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : body.substr(dot);
    std::string grouped;
    const int n = static_cast<int>(int_part.size());
    for (int k = 0; k < n; ++k) {
      grouped.push_back(int_part[k]);
      const int remaining = n - k - 1;
      if (remaining > 0 && remaining % 3 == 0) grouped.push_back(',');
    }
    body = grouped + frac;
  }
  std::string out;
  if (magnitude < 0) out.push_back('-');
  if (style.currency) out.push_back('$');
  out += body;
  out += style.suffix;
  return out;
}

double RoundSignificant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  // Round through the decimal string to avoid pow() drift in the last ulp.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, v);
  return std::stod(buf);
}

std::string CompactValue(double value, bool percent) {
  const double v = RoundSignificant(value, 3);
  auto trimmed = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    std::string s(buf);
    if (s.find('e') != std::string::npos) {
      std::snprintf(buf, sizeof(buf), "%.0f", x);
      s = buf;
    }
    return s;
  };
  if (percent) return trimmed(v) + "%";
  struct Step {
    double scale;
    const char* suffix;
  };
  constexpr std::array<Step, 4> kSteps = {
      {{1e12, "T"}, {1e9, "B"}, {1e6, "M"}, {1e3, "K"}}};
  for (const auto& s : kSteps) {
    if (std::fabs(v) >= s.scale) return trimmed(v / s.scale) + s.suffix;
  }
  return trimmed(v);
}

TokenizedText Tokenize(std::string_view text) {
  TokenizedText out;
  out.numerics = FindNumerics(text);
  std::size_t next_numeric = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (next_numeric < out.numerics.size() &&
        out.numerics[next_numeric].begin == i) {
      const auto& m = out.numerics[next_numeric];
      Token t;
      t.kind = TokenKind::kNumber;
      t.begin = m.begin;
      t.end = m.end;
      t.text = std::string(text.substr(m.begin, m.end - m.begin));
      t.lower = ToLower(t.text);
      t.numeric = static_cast<int>(next_numeric);
      out.tokens.push_back(std::move(t));
      i = m.end;
      ++next_numeric;
      continue;
    }
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.begin = i;
    if (IsAlnum(c)) {
      std::size_t j = i;
      while (j < text.size() &&
             (IsAlnum(text[j]) || text[j] == '&' ||
              (text[j] == '-' && j + 1 < text.size() && IsAlnum(text[j + 1])))) {
        ++j;
      }
      t.kind = TokenKind::kWord;
      t.end = j;
    } else if ((c == '\'' || c == '`') && i + 1 < text.size() &&
               (text[i + 1] == 's' || text[i + 1] == 'S') &&
               (i + 2 >= text.size() || !IsAlnum(text[i + 2]))) {
      t.kind = TokenKind::kPossessive;
      t.end = i + 2;
    } else if (static_cast<unsigned char>(c) == 0xE2 && i + 3 < text.size() &&
               static_cast<unsigned char>(text[i + 1]) == 0x80 &&
               static_cast<unsigned char>(text[i + 2]) == 0x99 &&
               (text[i + 3] == 's' || text[i + 3] == 'S')) {
      t.kind = TokenKind::kPossessive;  // U+2019 right single quote
      t.end = i + 4;
    } else {
      t.kind = TokenKind::kPunct;
      t.end = i + 1;
      t.sentence_end = c == '.' || c == '!' || c == '?' || c == ';';
    }
    t.text = std::string(text.substr(t.begin, t.end - t.begin));
    t.lower = ToLower(t.text);
    i = t.end;
    out.tokens.push_back(std::move(t));
  }
  return out;
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string NormalizeForMatch(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : Trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Splice(std::string_view s, std::size_t begin, std::size_t end,
                   std::string_view replacement) {
  std::string out;
  out.reserve(s.size() + replacement.size());
  out.append(s.substr(0, begin));
  out.append(replacement);
  out.append(s.substr(end));
  return out;
}

}  // namespace eclipse::text
