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

#ifndef STYLOMASK_TOY_LM_H_
#define STYLOMASK_TOY_LM_H_

#include <span>
#include <string>
#include <vector>

#include "stylomask/lm_provider.h"

namespace stylomask {

// Deterministic stand-in for a masked language model.
//
//  * v(w): unit vector drawn from a SplitMix64 stream seeded with FNV-1a(w).
//  * h_i = normalize(v(D_i) + 0.5 v(D_{i-1}) + 0.5 v(D_{i+1})); missing
//    neighbours count as zero.
//  * attention w_{i,t} proportional to exp(-|i - t|), normalized.
//  * mask fill ranks the vocabulary by cosine to the mean of the two
//    neighbour base vectors (the target itself is invisible).
//  * dropout fill zeroes round(p * dim) coordinates of v(target), chosen by a
//    generator seeded with (FNV-1a(target), seed), and ranks the vocabulary
//    by cosine to the perturbed vector.
//
// Candidate scores are those cosines. Ties keep vocabulary order. The object
// is immutable after construction, so concurrent calls are safe.
class ToyLm : public LmProvider {
 public:
  static constexpr size_t kDefaultDim = 32;

  explicit ToyLm(std::vector<std::string> vocabulary, size_t dim = kDefaultDim);
  // First whitespace-separated field of every line; a word2vec-style
  // "<count> <dim>" header is skipped and duplicates are dropped.
  static ToyLm FromVocabularyFile(const std::string& path, size_t dim = kDefaultDim);

  FillResponse Fill(const FillRequest& request) override;
  EncodeResponse Encode(const EncodeRequest& request) override;

  std::vector<double> BaseVector(std::string_view word) const;
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  size_t dim() const { return dim_; }

 private:
  std::vector<ScoredToken> RankVocabulary(std::span<const double> query,
                                          size_t top_k) const;

  std::vector<std::string> vocabulary_;
  size_t dim_;
  std::vector<std::vector<double>> vocab_vectors_;
};

}  // namespace stylomask

#endif  // STYLOMASK_TOY_LM_H_
