/*
 * Copyright 2026 The genlevel Authors.
 *
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

#include "genlevel/core/text.hpp"

#include <cctype>

#include "genlevel/core/error.hpp"

namespace genlevel::text {
namespace {

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 0;
}

bool is_separator(unsigned char c) {
  return c < 0x80 && (std::isspace(c) != 0 || std::ispunct(c) != 0);
}

}  // namespace

std::vector<std::size_t> code_point_boundaries(std::string_view s) {
  std::vector<std::size_t> out;
  out.reserve(s.size() + 1);
  std::size_t i = 0;
  while (i < s.size()) {
    out.push_back(i);
    const auto lead = static_cast<unsigned char>(s[i]);
    const std::size_t len = sequence_length(lead);
    if (len == 0 || i + len > s.size()) {
      throw ValidationError("malformed UTF-8 at byte " + std::to_string(i));
    }
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        throw ValidationError("malformed UTF-8 at byte " + std::to_string(i + k));
      }
    }
    i += len;
  }
  out.push_back(s.size());
  return out;
}

std::size_t code_point_length(std::string_view s) {
  return code_point_boundaries(s).size() - 1;
}

std::string substr_code_points(std::string_view s, std::size_t begin, std::size_t end) {
  const auto b = code_point_boundaries(s);
  const std::size_t n = b.size() - 1;
  if (begin > end || end > n) {
    throw InvalidArgument("code point range [" + std::to_string(begin) + ", " +
                          std::to_string(end) + ") out of bounds for length " +
                          std::to_string(n));
  }
  return std::string(s.substr(b[begin], b[end] - b[begin]));
}

std::string splice_code_points(std::string_view s, std::size_t begin, std::size_t end,
                               std::string_view replacement) {
  const auto b = code_point_boundaries(s);
  const std::size_t n = b.size() - 1;
  if (begin > end || end > n) {
    throw InvalidArgument("span [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") out of bounds for length " + std::to_string(n));
  }
  std::string out;
  out.reserve(s.size() - (b[end] - b[begin]) + replacement.size());
  out.append(s.substr(0, b[begin]));
  out.append(replacement);
  out.append(s.substr(b[end]));
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_separator(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> char_ngrams(std::string_view token, std::size_t n) {
  std::vector<std::string> grams;
  if (n == 0) return grams;
  const auto b = code_point_boundaries(token);
  const std::size_t len = b.size() - 1;
  if (len < n) return grams;
  grams.reserve(len - n + 1);
  for (std::size_t i = 0; i + n <= len; ++i) {
    grams.emplace_back(token.substr(b[i], b[i + n] - b[i]));
  }
  return grams;
}

}  // namespace genlevel::text
