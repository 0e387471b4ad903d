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

#include "stylomask/toy_lm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "stylomask/embeddings.h"
#include "stylomask/errors.h"
#include "stylomask/rng.h"

namespace stylomask {

ToyLm::ToyLm(std::vector<std::string> vocabulary, size_t dim)
    : vocabulary_(std::move(vocabulary)), dim_(dim) {
  if (dim_ == 0) throw ConfigError("toy LM dimension must be positive");
  vocab_vectors_.reserve(vocabulary_.size());
  for (const auto& w : vocabulary_) vocab_vectors_.push_back(BaseVector(w));
}

ToyLm ToyLm::FromVocabularyFile(const std::string& path, size_t dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary " + path);
  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string word, second, third;
    if (!(fields >> word)) continue;
    if (first) {
      first = false;
      // word2vec header: exactly two integers.
      if ((fields >> second) && !(fields >> third) &&
          word.find_first_not_of("0123456789") == std::string::npos &&
          second.find_first_not_of("0123456789") == std::string::npos) {
        continue;
      }
    }
    if (seen.insert(word).second) vocab.push_back(word);
  }
  return ToyLm(std::move(vocab), dim);
}

std::vector<double> ToyLm::BaseVector(std::string_view word) const {
  SplitMix64 rng(Fnv1a64(word));
  std::vector<double> v(dim_);
  for (double& x : v) x = 2.0 * rng.Uniform() - 1.0;
  NormalizeInPlace(v);
  return v;
}

std::vector<ScoredToken> ToyLm::RankVocabulary(std::span<const double> query,
                                               size_t top_k) const {
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(vocabulary_.size());
  for (size_t i = 0; i < vocabulary_.size(); ++i) {
    if (vocabulary_[i] == kMaskToken) continue;
    scored.emplace_back(Cosine(query, vocab_vectors_[i]), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > top_k) scored.resize(top_k);
  std::vector<ScoredToken> out;
  out.reserve(scored.size());
  for (const auto& [score, i] : scored) out.push_back({vocabulary_[i], score});
  return out;
}

FillResponse ToyLm::Fill(const FillRequest& request) {
  ValidateRequest(request);
  FillResponse response;
  response.request_id = request.request_id;
  if (request.top_k == 0) return response;
  const size_t t = request.target_index;
  std::vector<double> query(dim_, 0.0);
  if (request.kind == FillKind::kMask) {
    auto add_neighbour = [&](const std::string& word) {
      const auto v = BaseVector(word);
      for (size_t k = 0; k < dim_; ++k) query[k] += 0.5 * v[k];
    };
    if (t > 0) add_neighbour(request.tokens[t - 1]);
    if (t + 1 < request.tokens.size()) add_neighbour(request.tokens[t + 1]);
  } else {
    query = BaseVector(request.tokens[t]);
    std::vector<size_t> coords(dim_);
    std::iota(coords.begin(), coords.end(), size_t{0});
    SplitMix64 rng(MixSeed(Fnv1a64(request.tokens[t]), request.seed));
    const auto drop = static_cast<size_t>(
        std::floor(request.dropout_p * static_cast<double>(dim_) + 0.5));
    for (size_t k = 0; k < drop && k < dim_; ++k) {
      const size_t j = k + static_cast<size_t>(rng.Below(dim_ - k));
      std::swap(coords[k], coords[j]);
      query[coords[k]] = 0.0;
    }
  }
  response.candidates = RankVocabulary(query, request.top_k);
  return response;
}

EncodeResponse ToyLm::Encode(const EncodeRequest& request) {
  ValidateRequest(request);
  const size_t n = request.tokens.size();
  std::vector<std::vector<double>> base;
  base.reserve(n);
  for (const auto& tok : request.tokens) base.push_back(BaseVector(tok));

  EncodeResponse response;
  response.request_id = request.request_id;
  response.vectors.resize(n, std::vector<double>(dim_, 0.0));
  for (size_t i = 0; i < n; ++i) {
    auto& h = response.vectors[i];
    for (size_t k = 0; k < dim_; ++k) {
      h[k] = base[i][k];
      if (i > 0) h[k] += 0.5 * base[i - 1][k];
      if (i + 1 < n) h[k] += 0.5 * base[i + 1][k];
    }
    NormalizeInPlace(h);
  }
  response.attention.resize(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = i > request.target_index ? double(i - request.target_index)
                                              : double(request.target_index - i);
    response.attention[i] = std::exp(-d);
    total += response.attention[i];
  }
  for (double& w : response.attention) w /= total;
  return response;
}

}  // namespace stylomask
