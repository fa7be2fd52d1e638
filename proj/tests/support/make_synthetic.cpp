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

// Regenerates the synthetic fixtures under tests/data.
//
//   make_synthetic separable OUT.jsonl
//   make_synthetic benchmark TRAIN.jsonl TEST.jsonl [n_train n_test seed]

#include <cstdlib>
#include <iostream>
#include <string>

#include "genlevel/core/corpus.hpp"
#include "genlevel/core/error.hpp"
#include "synthetic.hpp"

int main(int argc, char** argv) {
  try {
    const std::string mode = argc > 1 ? argv[1] : "";
    if (mode == "separable" && argc == 3) {
      genlevel::save_dataset(argv[2], genlevel::testing::separable_records());
      return 0;
    }
    if (mode == "benchmark" && (argc == 4 || argc == 7)) {
      std::size_t n_train = 400, n_test = 200;
      std::uint64_t seed = 7;
      if (argc == 7) {
        n_train = std::stoul(argv[4]);
        n_test = std::stoul(argv[5]);
        seed = std::stoull(argv[6]);
      }
      const auto splits = genlevel::testing::benchmark_splits(n_train, n_test, seed);
      genlevel::save_dataset(argv[2], splits.train);
      genlevel::save_dataset(argv[3], splits.test);
      return 0;
    }
    std::cerr << "usage: make_synthetic separable OUT | benchmark TRAIN TEST [n_train n_test seed]\n";
    return 2;
  } catch (const genlevel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
