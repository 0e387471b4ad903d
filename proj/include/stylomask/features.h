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

#ifndef STYLOMASK_FEATURES_H_
#define STYLOMASK_FEATURES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stylomask/corpus.h"

namespace stylomask {

struct FeatureConfig {
  std::vector<int> word_ngram_orders = {1, 2};
  std::vector<int> char_ngram_orders;  // empty: no character features
  bool sublinear_tf = false;
  int min_df = 1;

  // Word uni+bi-grams, raw tf. The substitute model's features.
  static FeatureConfig WordUniBigram();
  // Word uni+bi-grams plus character 6-grams, sublinear tf.
  static FeatureConfig NGram();

  void Validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

// Sorted (index, value) pairs with strictly increasing indices.
struct SparseVector {
  std::vector<uint32_t> indices;
  std::vector<double> values;

  size_t nnz() const { return indices.size(); }
  double Norm() const;
  double Dot(std::span<const double> dense) const;
};

// Surfaces fed to the n-gram extractors. A surface holding spaces (the output
// of the random-space heuristic) contributes each piece as its own word.
std::vector<std::string> FeatureWords(std::span<const std::string> surfaces);

// Every n-gram key of `surfaces` under `config`, with multiplicity. Word keys
// are "w:" + space-joined words, character keys "c:" + code points taken
// from the space-joined token sequence.
std::vector<std::string> ExtractNgrams(std::span<const std::string> surfaces,
                                       const FeatureConfig& config);

class FeatureSpace {
 public:
  FeatureSpace() = default;

  // Vocabulary = all n-grams with df >= min_df, indexed in lexicographic
  // order; idf(t) = ln((1 + n) / (1 + df(t))) + 1.
  static FeatureSpace Fit(std::span<const Document> docs,
                          const FeatureConfig& config);
  static FeatureSpace Fit(std::span<const std::vector<std::string>> docs,
                          const FeatureConfig& config);
  static FeatureSpace FromParts(FeatureConfig config,
                                std::vector<std::string> features,
                                std::vector<double> idf);

  // tf (or 1 + ln tf) times idf, L2-normalized. Unknown n-grams are dropped;
  // a document with none in vocabulary maps to the zero vector.
  SparseVector Vectorize(std::span<const std::string> surfaces) const;
  SparseVector Vectorize(const Document& doc) const;

  size_t dimension() const { return features_.size(); }
  std::optional<uint32_t> IndexOf(const std::string& feature) const;
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<double>& idf() const { return idf_; }
  const FeatureConfig& config() const { return config_; }

 private:
  FeatureConfig config_;
  std::vector<std::string> features_;
  std::vector<double> idf_;
  std::unordered_map<std::string, uint32_t> index_;
};

}  // namespace stylomask

#endif  // STYLOMASK_FEATURES_H_
