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

#include "stylomask/synth.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "stylomask/errors.h"
#include "stylomask/rng.h"

namespace stylomask {
namespace {

constexpr std::string_view kConsonants = "bdfgkmnprstvz";
constexpr std::string_view kVowels = "aeiou";
const std::vector<std::string> kFunctionWords = {"i",  "you", "the", "a",  "to", "and",
                                                 "is", "it",  "my",  "so", "of", "in"};
const std::vector<std::string> kPunct = {"!", ".", "?", ",", "!!"};

// Suffix groups by tag under the lexicon tagger.
const std::vector<std::vector<std::string>> kSuffixes = {
    {"ness", "ment", "tion"},  // noun
    {"ous", "ful", "ive"},     // adjective
    {"ing", "ize"},            // verb
    {"ly"},                    // adverb
};

class WordMaker {
 public:
  explicit WordMaker(uint64_t seed) : rng_(seed) {
    for (const auto& w : kFunctionWords) used_.insert(w);
  }

  std::string Stem(size_t syllables) {
    std::string s;
    for (size_t i = 0; i < syllables; ++i) {
      s += kConsonants[rng_.Below(kConsonants.size())];
      s += kVowels[rng_.Below(kVowels.size())];
    }
    return s;
  }

  std::string Fresh(size_t syllables, const std::string& suffix = "") {
    for (;;) {
      std::string w = Stem(syllables) + suffix;
      if (used_.insert(w).second) return w;
    }
  }

  SplitMix64& rng() { return rng_; }

 private:
  SplitMix64 rng_;
  std::set<std::string> used_;
};

std::vector<double> RandomUnit(SplitMix64& rng, size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = 2.0 * rng.Uniform() - 1.0;
  NormalizeInPlace(v);
  return v;
}

// Unit vector at cosine `c` from unit vector `v`.
std::vector<double> Near(const std::vector<double>& v, double c, SplitMix64& rng) {
  std::vector<double> u = RandomUnit(rng, v.size());
  double d = 0.0;
  for (size_t k = 0; k < v.size(); ++k) d += u[k] * v[k];
  for (size_t k = 0; k < v.size(); ++k) u[k] -= d * v[k];
  NormalizeInPlace(u);
  const double s = std::sqrt(1.0 - c * c);
  std::vector<double> out(v.size());
  for (size_t k = 0; k < v.size(); ++k) out[k] = c * v[k] + s * u[k];
  return out;
}

struct Lexicon {
  std::vector<std::string> neutral;
  std::vector<double> neutral_cdf;
  std::vector<std::vector<std::string>> markers;
  std::vector<std::vector<std::string>> decoys;
};

std::string Draw(const std::vector<std::string>& words, const std::vector<double>& cdf,
                 SplitMix64& rng) {
  const double u = rng.Uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return words[std::min<size_t>(static_cast<size_t>(it - cdf.begin()), words.size() - 1)];
}

void EmitCorpus(const SynthConfig& config, const Lexicon& lex, bool substitute,
                std::vector<RawTweet>& out) {
  SplitMix64 rng(MixSeed(config.seed, substitute ? 0x5u : 0x7u));
  const size_t n = config.authors_per_class * 2;
  std::vector<size_t> classes(n);
  for (size_t a = 0; a < n; ++a) classes[a] = a % 2;
  for (size_t a = n; a > 1; --a) std::swap(classes[a - 1], classes[rng.Below(a)]);

  const double shift = substitute ? config.domain_shift : 0.0;
  const std::string prefix = substitute ? "s" : "t";
  for (size_t a = 0; a < n; ++a) {
    const size_t cls = classes[a];
    const std::string author = prefix + std::to_string(a);
    for (size_t t = 0; t < config.tweets_per_author; ++t) {
      std::string text;
      auto add = [&](const std::string& w) {
        if (!text.empty()) text += ' ';
        text += w;
      };
      if (rng.Bernoulli(config.mention_rate)) add("@friend" + std::to_string(rng.Below(50)));
      const size_t span = config.max_tweet_length - config.min_tweet_length + 1;
      const size_t len = config.min_tweet_length + rng.Below(span);
      for (size_t k = 0; k < len; ++k) {
        if (rng.Bernoulli(config.marker_rate)) {
          const size_t c = rng.Bernoulli(config.marker_noise) ? 1 - cls : cls;
          const auto& pool = rng.Bernoulli(shift) ? lex.decoys[c] : lex.markers[c];
          add(pool[rng.Below(pool.size())]);
        } else {
          add(Draw(lex.neutral, lex.neutral_cdf, rng));
        }
      }
      if (rng.Bernoulli(config.hashtag_rate)) {
        add("#" + lex.neutral[rng.Below(lex.neutral.size())]);
      }
      if (rng.Bernoulli(config.punct_rate)) {
        text += kPunct[rng.Below(kPunct.size())];
      }
      if (rng.Bernoulli(config.url_rate)) add("http://t.co/" + std::to_string(rng.Below(100000)));
      out.push_back({author, text, config.labels[cls]});
    }
  }
}

}  // namespace

void SynthConfig::Validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob(marker_rate, "marker_rate");
  prob(marker_noise, "marker_noise");
  prob(domain_shift, "domain_shift");
  prob(mention_rate, "mention_rate");
  prob(hashtag_rate, "hashtag_rate");
  prob(url_rate, "url_rate");
  prob(punct_rate, "punct_rate");
  if (authors_per_class == 0 || tweets_per_author == 0) {
    throw ConfigError("need at least one author per class and one tweet per author");
  }
  if (vocabulary_size == 0 || markers_per_class == 0) {
    throw ConfigError("vocabulary and marker lists must be non-empty");
  }
  if (min_tweet_length == 0 || min_tweet_length > max_tweet_length) {
    throw ConfigError("tweet length range is empty");
  }
  if (embedding_dim < 8) throw ConfigError("embedding_dim must be at least 8");
  if (labels.size() != 2 || labels[0] == labels[1] || labels[0].empty() ||
      labels[1].empty()) {
    throw ConfigError("exactly two distinct labels are required");
  }
}

nlohmann::json SynthConfig::ToJson() const {
  return {{"seed", seed},
          {"authors_per_class", authors_per_class},
          {"tweets_per_author", tweets_per_author},
          {"vocabulary_size", vocabulary_size},
          {"markers_per_class", markers_per_class},
          {"marker_rate", marker_rate},
          {"marker_noise", marker_noise},
          {"domain_shift", domain_shift},
          {"min_tweet_length", min_tweet_length},
          {"max_tweet_length", max_tweet_length},
          {"mention_rate", mention_rate},
          {"hashtag_rate", hashtag_rate},
          {"url_rate", url_rate},
          {"punct_rate", punct_rate},
          {"embedding_dim", embedding_dim},
          {"labels", labels}};
}

SynthConfig SynthConfig::FromJson(const nlohmann::json& j) {
  SynthConfig c;
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("synth config ") + key + ": " + e.what());
    }
  };
  get("seed", c.seed);
  get("authors_per_class", c.authors_per_class);
  get("tweets_per_author", c.tweets_per_author);
  get("vocabulary_size", c.vocabulary_size);
  get("markers_per_class", c.markers_per_class);
  get("marker_rate", c.marker_rate);
  get("marker_noise", c.marker_noise);
  get("domain_shift", c.domain_shift);
  get("min_tweet_length", c.min_tweet_length);
  get("max_tweet_length", c.max_tweet_length);
  get("mention_rate", c.mention_rate);
  get("hashtag_rate", c.hashtag_rate);
  get("url_rate", c.url_rate);
  get("punct_rate", c.punct_rate);
  get("embedding_dim", c.embedding_dim);
  get("labels", c.labels);
  c.Validate();
  return c;
}

SynthOutput GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  // The lexicon depends on the seed only, so corpora that differ in shift
  // share their words.
  WordMaker maker(MixSeed(config.seed, 0x1u));
  SplitMix64 vec_rng(MixSeed(config.seed, 0x3u));
  SynthOutput out;
  Lexicon lex;

  lex.neutral = kFunctionWords;
  while (lex.neutral.size() < config.vocabulary_size + kFunctionWords.size()) {
    lex.neutral.push_back(maker.Fresh(2 + maker.rng().Below(2)));
  }
  double acc = 0.0;
  for (size_t r = 0; r < lex.neutral.size(); ++r) {
    acc += 1.0 / static_cast<double>(r + 1);
    lex.neutral_cdf.push_back(acc);
  }

  std::vector<std::string> words = lex.neutral;
  std::vector<std::vector<double>> vectors;
  for (size_t i = 0; i < words.size(); ++i) vectors.push_back(RandomUnit(vec_rng, config.embedding_dim));
  std::vector<std::string> extra;  // synonyms go after markers in the vocabulary

  // A marker and its synonyms. Even-numbered markers get a synonym with the
  // same part of speech; odd-numbered ones get one that tags differently.
  auto planted = [&](size_t index) {
    const size_t group = maker.rng().Below(kSuffixes.size());
    const auto& g = kSuffixes[group];
    const std::string marker = maker.Fresh(2, g[maker.rng().Below(g.size())]);
    const size_t syn_group =
        index % 2 == 0 ? group : (group + 1 + maker.rng().Below(kSuffixes.size() - 1)) % kSuffixes.size();
    const auto& sg = kSuffixes[syn_group];
    std::vector<std::string> syns = {maker.Fresh(2, sg[maker.rng().Below(sg.size())])};
    const auto v = RandomUnit(vec_rng, config.embedding_dim);
    words.push_back(marker);
    vectors.push_back(v);
    extra.push_back(syns[0]);
    vectors.push_back(Near(v, 0.85, vec_rng));
    out.synonyms.push_back({marker, syns});
    return marker;
  };

  lex.markers.resize(2);
  lex.decoys.resize(2);
  for (size_t c = 0; c < 2; ++c) {
    for (size_t m = 0; m < config.markers_per_class; ++m) {
      lex.markers[c].push_back(planted(m));
    }
  }
  for (size_t c = 0; c < 2; ++c) {
    for (size_t m = 0; m < config.markers_per_class; ++m) {
      lex.decoys[c].push_back(planted(m));
    }
  }

  // `words` holds neutral words then markers; `vectors` interleaves each
  // marker with its synonym. Rebuild both in vocabulary order.
  std::vector<std::string> all = lex.neutral;
  std::vector<std::vector<double>> all_vecs(vectors.begin(),
                                            vectors.begin() + static_cast<ptrdiff_t>(lex.neutral.size()));
  size_t vi = lex.neutral.size();
  for (size_t i = lex.neutral.size(); i < words.size(); ++i) {
    all.push_back(words[i]);
    all_vecs.push_back(vectors[vi++]);
    vi++;
  }
  vi = lex.neutral.size();
  for (const auto& s : extra) {
    all.push_back(s);
    all_vecs.push_back(vectors[vi + 1]);
    vi += 2;
  }
  out.vocabulary = all;
  out.embeddings = EmbeddingStore::FromVectors(std::move(all), std::move(all_vecs));
  out.markers = lex.markers;
  out.decoys = lex.decoys;

  EmitCorpus(config, lex, true, out.substitute);
  EmitCorpus(config, lex, false, out.target);
  return out;
}

}  // namespace stylomask
