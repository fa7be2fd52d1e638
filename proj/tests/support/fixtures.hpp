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

#ifndef GENLEVEL_TESTS_SUPPORT_FIXTURES_HPP_
#define GENLEVEL_TESTS_SUPPORT_FIXTURES_HPP_

#include <filesystem>
#include <string>

#include "genlevel/core/corpus.hpp"

namespace genlevel::testing {

// Directory holding the committed fixtures; set by the build.
inline std::filesystem::path data_dir() { return GENLEVEL_TEST_DATA_DIR; }

inline const char* kExampleText =
    "The person (born August 22, 1935) is a Canadian lawyer and former Senator.";

// The worked example: a date of birth with three candidates, level 2 chosen.
inline PiiRecord example_record() {
  PiiRecord r;
  r.id = "example-0";
  r.text = kExampleText;
  r.span_start = 17;
  r.span_end = 32;
  r.span_text = "August 22, 1935";
  r.semantic_type = {"DATETIME", 0};
  r.candidates = {"1935", "date in 1930s", "***"};
  r.majority_level = 2;
  r.all_levels = {2, 3};
  return r;
}

}  // namespace genlevel::testing

#endif  // GENLEVEL_TESTS_SUPPORT_FIXTURES_HPP_
