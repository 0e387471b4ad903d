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

#ifndef STYLOMASK_SYNTH_H_
#define STYLOMASK_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylomask/corpus.h"
#include "stylomask/embeddings.h"

namespace stylomask {

// Two-class synthetic timelines with planted marker words.
//
// Every token slot emits a class marker with probability `marker_rate`
// (drawn from the opposite class with probability `marker_noise`) and a
// neutral word otherwise. In the substitute corpus a marker emission is
// replaced by a substitute-only decoy marker with probability
// `domain_shift`, so the two corpora agree exactly when it is zero.
struct SynthConfig {
  uint64_t seed = 0;
  size_t authors_per_class = 500;
  size_t tweets_per_author = 20;
  size_t vocabulary_size = 400;
  size_t markers_per_class = 24;
  double marker_rate = 0.08;
  double marker_noise = 0.2;
  double domain_shift = 0.0;
  size_t min_tweet_length = 4;
  size_t max_tweet_length = 10;
  double mention_rate = 0.1;
  double hashtag_rate = 0.1;
  double url_rate = 0.05;
  double punct_rate = 0.3;
  size_t embedding_dim = 48;
  std::vector<std::string> labels = {"female", "male"};

  void Validate() const;
  nlohmann::json ToJson() const;
  static SynthConfig FromJson(const nlohmann::json& j);
};

struct SynthOutput {
  std::vector<RawTweet> substitute;
  std::vector<RawTweet> target;
  EmbeddingStore embeddings;
  // Every word the generator can emit, neutral words first. Suitable as a
  // toy LM vocabulary.
  std::vector<std::string> vocabulary;
  // markers[c] are the markers of labels[c]; decoys likewise.
  std::vector<std::vector<std::string>> markers;
  std::vector<std::vector<std::string>> decoys;
  // synonyms[w]: the neutral near-synonyms planted for marker or decoy w.
  std::vector<std::pair<std::string, std::vector<std::string>>> synonyms;
};

// Deterministic in the config. Author classes are interleaved in a seeded
// order so unshuffled splits stay mixed.
SynthOutput GenerateSynthetic(const SynthConfig& config);

}  // namespace stylomask

#endif  // STYLOMASK_SYNTH_H_
