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

#ifndef STYLOMASK_TESTS_TEST_UTIL_H_
#define STYLOMASK_TESTS_TEST_UTIL_H_

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stylomask/classifier.h"
#include "stylomask/corpus.h"
#include "stylomask/rng.h"

namespace stylomask::testing {

inline Document MakeDoc(const std::vector<std::string>& surfaces,
                        std::optional<std::string> label = std::nullopt) {
  Document d;
  d.author_id = "a";
  for (const auto& s : surfaces) d.tokens.push_back(ClassifySurface(s));
  d.label = std::move(label);
  if (!surfaces.empty()) d.tweet_boundaries = {0};
  d.tweet_count = 1;
  return d;
}

// Independent tf-idf + linear score for word uni/bi-gram models, written
// from the definitions rather than through FeatureSpace.
inline double NaiveDecision(const std::vector<std::string>& surfaces,
                            const std::map<std::string, double>& idf,
                            const std::map<std::string, double>& weight, double bias) {
  std::map<std::string, double> tf;
  for (size_t i = 0; i < surfaces.size(); ++i) {
    tf["w:" + surfaces[i]] += 1.0;
    if (i + 1 < surfaces.size()) tf["w:" + surfaces[i] + " " + surfaces[i + 1]] += 1.0;
  }
  double norm2 = 0.0, dot = 0.0;
  for (const auto& [g, c] : tf) {
    auto it = idf.find(g);
    if (it == idf.end()) continue;
    const double v = c * it->second;
    norm2 += v * v;
    auto w = weight.find(g);
    if (w != weight.end()) dot += v * w->second;
  }
  return (norm2 > 0 ? dot / std::sqrt(norm2) : 0.0) + bias;
}

// A word uni+bi-gram model over `vocab` with random weights, plus the same
// model as plain maps for the naive scorer.
struct RandomModel {
  TextClassifier model;
  std::map<std::string, double> idf;
  std::map<std::string, double> weight;
  double bias = 0.0;
};

inline RandomModel MakeRandomModel(const std::vector<std::string>& vocab, SplitMix64& rng) {
  RandomModel m;
  for (const auto& a : vocab) {
    m.idf["w:" + a] = 1.0 + 2.0 * rng.Uniform();
    for (const auto& b : vocab) {
      if (rng.Bernoulli(0.3)) m.idf["w:" + a + " " + b] = 1.0 + 2.0 * rng.Uniform();
    }
  }
  std::vector<std::string> features;
  std::vector<double> idf, w;
  for (const auto& [g, v] : m.idf) {
    features.push_back(g);
    idf.push_back(v);
    const double wt = 4.0 * rng.Uniform() - 2.0;
    w.push_back(wt);
    m.weight[g] = wt;
  }
  m.bias = rng.Uniform() - 0.5;
  auto space = FeatureSpace::FromParts(FeatureConfig::WordUniBigram(), features, idf);
  m.model = TextClassifier(std::move(space),
                           LinearClassifier(w, m.bias, LossKind::kLogistic, {"neg", "pos"}));
  return m;
}

}  // namespace stylomask::testing

#endif  // STYLOMASK_TESTS_TEST_UTIL_H_
