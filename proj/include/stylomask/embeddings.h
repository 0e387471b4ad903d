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

#ifndef STYLOMASK_EMBEDDINGS_H_
#define STYLOMASK_EMBEDDINGS_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stylomask {

// Cosine similarity; 0 when either side is the zero vector.
double Cosine(std::span<const double> a, std::span<const double> b);

// Scales `v` to unit length in place; the zero vector is left alone.
void NormalizeInPlace(std::span<double> v);

// Word vectors in the plain-text "word v1 ... vd" format (one per line). A
// leading "<count> <dim>" header line, as written by word2vec, is skipped.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  static EmbeddingStore FromVectors(std::vector<std::string> words,
                                    std::vector<std::vector<double>> vectors);
  static EmbeddingStore Load(std::istream& in);
  static EmbeddingStore LoadFile(const std::string& path);
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;

  size_t size() const { return words_.size(); }
  size_t dimension() const { return dim_; }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<size_t> IndexOf(const std::string& word) const;

  // Unit-normalized vector of entry `index`.
  std::span<const double> Unit(size_t index) const {
    return {unit_.data() + index * dim_, dim_};
  }
  std::span<const double> Raw(size_t index) const {
    return {raw_.data() + index * dim_, dim_};
  }

  // Up to `n` other words with cosine strictly above `min_similarity`, most
  // similar first; ties keep file order. Unknown words have no neighbours.
  std::vector<std::pair<std::string, double>> Nearest(
      const std::string& word, size_t n, double min_similarity) const;

 private:
  size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> raw_;
  std::vector<double> unit_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace stylomask

#endif  // STYLOMASK_EMBEDDINGS_H_
