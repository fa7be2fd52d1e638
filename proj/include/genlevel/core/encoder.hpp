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

#ifndef GENLEVEL_CORE_ENCODER_HPP_
#define GENLEVEL_CORE_ENCODER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genlevel/core/contextual.hpp"

namespace genlevel {

using Embedding = std::vector<double>;

// h(x) for the original sentence and h(x'_i) for every padded slot.
struct ExampleEmbeddings {
  Embedding original;
  std::vector<Embedding> candidates;
};

// Frozen sentence encoder. Implementations are immutable after
// construction and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string kind() const = 0;
  virtual ExampleEmbeddings embed_example(const ContextualExample& example) const = 0;
};

inline constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

std::uint64_t fnv1a64(std::string_view bytes);

// Signed feature hashing over lowercase tokens and their character n-grams,
// L2-normalized. Text without tokens maps to the zero vector.
Embedding hashed_embed(std::string_view text, std::size_t dim, std::size_t ngram_n = 3);

class HashedEmbedder final : public EmbeddingProvider {
 public:
  explicit HashedEmbedder(std::size_t dim = 768, std::size_t ngram_n = 3);

  std::size_t dim() const override { return dim_; }
  std::size_t ngram_n() const { return ngram_n_; }
  std::string kind() const override { return "hashed"; }

  Embedding embed(std::string_view text) const { return hashed_embed(text, dim_, ngram_n_); }
  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const;
  ExampleEmbeddings embed_example(const ContextualExample& example) const override;

 private:
  std::size_t dim_;
  std::size_t ngram_n_;
};

std::string store_key_original(std::string_view record_id);
// `level` is 1-based over the padded candidate list.
std::string store_key_candidate(std::string_view record_id, int level);

// Precomputed embeddings keyed by "<id>#orig" / "<id>#cand<i>", persisted in
// the PIEM binary format:
//   "PIEM" | u32 version=1 | u32 dim | u64 count |
//   count x (u32 key_len | key bytes | dim x f32), all little-endian.
class EmbeddingStore {
 public:
  static constexpr std::uint32_t kVersion = 1;

  explicit EmbeddingStore(std::size_t dim);

  static EmbeddingStore read(const std::filesystem::path& path);
  static EmbeddingStore from_bytes(std::string_view bytes);
  void write(const std::filesystem::path& path) const;
  std::string to_bytes() const;

  // Replaces an existing entry with the same key.
  void insert(std::string key, std::vector<float> values);
  bool contains(std::string_view key) const;
  // Throws KeyNotFound naming the key.
  const std::vector<float>& lookup(std::string_view key) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::size_t dim_;
  std::vector<std::string> keys_;
  std::vector<std::vector<float>> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

Embedding store_lookup(const EmbeddingStore& store, std::string_view key);

class StoreProvider final : public EmbeddingProvider {
 public:
  explicit StoreProvider(std::shared_ptr<const EmbeddingStore> store);

  std::size_t dim() const override { return store_->dim(); }
  std::string kind() const override { return "store"; }
  ExampleEmbeddings embed_example(const ContextualExample& example) const override;
  const EmbeddingStore& store() const { return *store_; }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
};

}  // namespace genlevel

#endif  // GENLEVEL_CORE_ENCODER_HPP_
