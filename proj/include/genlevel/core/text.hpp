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

#ifndef GENLEVEL_CORE_TEXT_HPP_
#define GENLEVEL_CORE_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace genlevel::text {

// Byte offset of every code point boundary in `s`, including the final
// one (== s.size()). Throws ValidationError on malformed UTF-8.
std::vector<std::size_t> code_point_boundaries(std::string_view s);

// Number of Unicode scalar values in `s`.
std::size_t code_point_length(std::string_view s);

// Substring by code point indices [begin, end).
std::string substr_code_points(std::string_view s, std::size_t begin, std::size_t end);

// Replaces code points [begin, end) of `s` with `replacement`.
std::string splice_code_points(std::string_view s, std::size_t begin, std::size_t end,
                               std::string_view replacement);

// ASCII-lowercases and splits on whitespace and ASCII punctuation. Bytes
// >= 0x80 are treated as word characters, so non-Latin scripts survive as
// whole tokens.
std::vector<std::string> tokenize(std::string_view s);

// Code-point n-grams of a single token. Tokens shorter than n yield nothing.
std::vector<std::string> char_ngrams(std::string_view token, std::size_t n);

}  // namespace genlevel::text

#endif  // GENLEVEL_CORE_TEXT_HPP_
