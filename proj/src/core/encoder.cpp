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

#include "genlevel/core/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "genlevel/core/error.hpp"
#include "genlevel/core/text.hpp"

namespace genlevel {
namespace {

static_assert(std::endian::native == std::endian::little,
              "PIEM I/O assumes a little-endian host");

void add_feature(std::string_view feature, std::vector<double>& acc) {
  const std::uint64_t h = fnv1a64(feature);
  const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
  acc[h % acc.size()] += sign;
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(std::string("truncated embedding store while reading ") + what);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffset;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

Embedding hashed_embed(std::string_view text, std::size_t dim, std::size_t ngram_n) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be >= 1");
  Embedding acc(dim, 0.0);
  for (const auto& token : text::tokenize(text)) {
    add_feature(token, acc);
    for (const auto& gram : text::char_ngrams(token, ngram_n)) add_feature(gram, acc);
  }
  double norm2 = 0.0;
  for (const double v : acc) norm2 += v * v;
  if (norm2 == 0.0) return acc;
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : acc) v *= inv;
  return acc;
}

HashedEmbedder::HashedEmbedder(std::size_t dim, std::size_t ngram_n)
    : dim_(dim), ngram_n_(ngram_n) {
  if (dim_ == 0) throw InvalidArgument("embedding dimension must be >= 1");
}

std::vector<Embedding> HashedEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

ExampleEmbeddings HashedEmbedder::embed_example(const ContextualExample& example) const {
  ExampleEmbeddings e;
  e.original = embed(example.original_text);
  e.candidates = embed_batch(example.generalized_sentences);
  return e;
}

std::string store_key_original(std::string_view record_id) {
  return std::string(record_id) + "#orig";
}

std::string store_key_candidate(std::string_view record_id, int level) {
  return std::string(record_id) + "#cand" + std::to_string(level);
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw InvalidArgument("embedding store dimension must be >= 1");
}

void EmbeddingStore::insert(std::string key, std::vector<float> values) {
  if (values.size() != dim_) {
    throw InvalidArgument("embedding for '" + key + "' has dimension " +
                          std::to_string(values.size()) + ", store expects " +
                          std::to_string(dim_));
  }
  if (const auto it = index_.find(key); it != index_.end()) {
    values_[it->second] = std::move(values);
    return;
  }
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  values_.push_back(std::move(values));
}

bool EmbeddingStore::contains(std::string_view key) const {
  return index_.find(std::string(key)) != index_.end();
}

const std::vector<float>& EmbeddingStore::lookup(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  if (it == index_.end()) throw KeyNotFound(std::string(key));
  return values_[it->second];
}

std::string EmbeddingStore::to_bytes() const {
  std::string out;
  out.append("PIEM", 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(keys_.size()));
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(keys_[i].size()));
    out.append(keys_[i]);
    out.append(reinterpret_cast<const char*>(values_[i].data()), dim_ * sizeof(float));
  }
  return out;
}

EmbeddingStore EmbeddingStore::from_bytes(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4, "magic") != "PIEM") throw ParseError("embedding store: bad magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) {
    throw ParseError("embedding store: unsupported version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>("dim");
  if (dim == 0) throw ParseError("embedding store: dim is 0");
  const auto count = r.get<std::uint64_t>("count");
  EmbeddingStore store(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto key_len = r.get<std::uint32_t>("key length");
    std::string key(r.take(key_len, "key"));
    const auto raw = r.take(static_cast<std::size_t>(dim) * sizeof(float), "vector");
    std::vector<float> values(dim);
    std::memcpy(values.data(), raw.data(), raw.size());
    if (store.contains(key)) throw ParseError("embedding store: duplicate key '" + key + "'");
    store.insert(std::move(key), std::move(values));
  }
  if (!r.done()) throw ParseError("embedding store: trailing bytes after last record");
  return store;
}

EmbeddingStore EmbeddingStore::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding store '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_bytes(buf.str());
}

void EmbeddingStore::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embedding store '" + path.string() + "'");
  const std::string bytes = to_bytes();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Embedding store_lookup(const EmbeddingStore& store, std::string_view key) {
  const auto& v = store.lookup(key);
  return Embedding(v.begin(), v.end());
}

StoreProvider::StoreProvider(std::shared_ptr<const EmbeddingStore> store)
    : store_(std::move(store)) {
  if (!store_) throw InvalidArgument("null embedding store");
}

ExampleEmbeddings StoreProvider::embed_example(const ContextualExample& example) const {
  ExampleEmbeddings e;
  e.original = store_lookup(*store_, store_key_original(example.record_id));
  e.candidates.reserve(example.generalized_sentences.size());
  for (int i = 1; i <= example.max_candidates(); ++i) {
    e.candidates.push_back(store_lookup(*store_, store_key_candidate(example.record_id, i)));
  }
  return e;
}

}  // namespace genlevel
