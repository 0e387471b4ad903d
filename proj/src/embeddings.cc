// Copyright 2026 The Stylomask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stylomask/embeddings.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool ParseDouble(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool IsUnsigned(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

double Cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void NormalizeInPlace(std::span<double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0) return;
  const double norm = std::sqrt(s);
  for (double& x : v) x /= norm;
}

EmbeddingStore EmbeddingStore::FromVectors(std::vector<std::string> words,
                                           std::vector<std::vector<double>> vectors) {
  if (words.size() != vectors.size()) {
    throw DataError("word/vector count mismatch");
  }
  EmbeddingStore store;
  store.dim_ = vectors.empty() ? 0 : vectors.front().size();
  store.words_ = std::move(words);
  store.raw_.reserve(store.words_.size() * store.dim_);
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != store.dim_) {
      throw DataError("embedding for '" + store.words_[i] + "' has dimension " +
                      std::to_string(vectors[i].size()) + ", expected " +
                      std::to_string(store.dim_));
    }
    if (!store.index_.emplace(store.words_[i], i).second) {
      throw DataError("duplicate embedding entry '" + store.words_[i] + "'");
    }
    store.raw_.insert(store.raw_.end(), vectors[i].begin(), vectors[i].end());
  }
  store.unit_ = store.raw_;
  for (size_t i = 0; i < store.words_.size(); ++i) {
    NormalizeInPlace({store.unit_.data() + i * store.dim_, store.dim_});
  }
  return store;
}

EmbeddingStore EmbeddingStore::Load(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::vector<double>> vectors;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (lineno == 1 && fields.size() == 2 && IsUnsigned(fields[0]) &&
        IsUnsigned(fields[1])) {
      continue;
    }
    if (fields.size() < 2) {
      throw DataError("embedding line " + std::to_string(lineno) + " has no vector");
    }
    std::vector<double> v(fields.size() - 1);
    for (size_t k = 1; k < fields.size(); ++k) {
      if (!ParseDouble(fields[k], v[k - 1])) {
        throw DataError("embedding line " + std::to_string(lineno) +
                        ": bad number '" + std::string(fields[k]) + "'");
      }
    }
    words.emplace_back(fields[0]);
    vectors.push_back(std::move(v));
  }
  return FromVectors(std::move(words), std::move(vectors));
}

EmbeddingStore EmbeddingStore::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return Load(in);
}

void EmbeddingStore::Save(std::ostream& out) const {
  char buf[64];
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (double x : Raw(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<size_t>(ptr - buf));
    }
    out << '\n';
  }
}

void EmbeddingStore::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  Save(out);
}

std::optional<size_t> EmbeddingStore::IndexOf(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, double>> EmbeddingStore::Nearest(
    const std::string& word, size_t n, double min_similarity) const {
  std::vector<std::pair<std::string, double>> out;
  const auto self = IndexOf(word);
  if (!self || n == 0) return out;
  const auto target = Unit(*self);
  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < words_.size(); ++i) {
    if (i == *self) continue;
    const auto u = Unit(i);
    double dot = 0.0;
    for (size_t k = 0; k < dim_; ++k) dot += target[k] * u[k];
    if (dot > min_similarity) scored.emplace_back(dot, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > n) scored.resize(n);
  out.reserve(scored.size());
  for (const auto& [sim, i] : scored) out.emplace_back(words_[i], sim);
  return out;
}

}  // namespace stylomask
