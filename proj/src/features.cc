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

#include "stylomask/features.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "stylomask/errors.h"

namespace stylomask {
namespace {

// Byte offsets of UTF-8 code point starts, plus a final end offset.
std::vector<size_t> CodePointOffsets(std::string_view s) {
  std::vector<size_t> offs;
  offs.reserve(s.size() + 1);
  for (size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offs.push_back(i);
  }
  offs.push_back(s.size());
  return offs;
}

std::vector<std::vector<std::string>> SurfacesOf(std::span<const Document> docs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.Surfaces());
  return out;
}

}  // namespace

FeatureConfig FeatureConfig::WordUniBigram() { return FeatureConfig{}; }

FeatureConfig FeatureConfig::NGram() {
  FeatureConfig c;
  c.char_ngram_orders = {6};
  c.sublinear_tf = true;
  return c;
}

void FeatureConfig::Validate() const {
  if (word_ngram_orders.empty() && char_ngram_orders.empty()) {
    throw ConfigError("feature config has no n-gram orders");
  }
  for (int n : word_ngram_orders) {
    if (n < 1) throw ConfigError("word n-gram order must be >= 1");
  }
  for (int n : char_ngram_orders) {
    if (n < 1) throw ConfigError("char n-gram order must be >= 1");
  }
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
}

double SparseVector::Norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::Dot(std::span<const double> dense) const {
  double s = 0.0;
  for (size_t k = 0; k < indices.size(); ++k) s += values[k] * dense[indices[k]];
  return s;
}

std::vector<std::string> FeatureWords(std::span<const std::string> surfaces) {
  std::vector<std::string> words;
  words.reserve(surfaces.size());
  for (const auto& s : surfaces) {
    if (s.find(' ') == std::string::npos) {
      words.push_back(s);
      continue;
    }
    size_t i = 0;
    while (i < s.size()) {
      size_t j = s.find(' ', i);
      if (j == std::string::npos) j = s.size();
      if (j > i) words.push_back(s.substr(i, j - i));
      i = j + 1;
    }
  }
  return words;
}

std::vector<std::string> ExtractNgrams(std::span<const std::string> surfaces,
                                       const FeatureConfig& config) {
  std::vector<std::string> out;
  const auto words = FeatureWords(surfaces);
  for (int order : config.word_ngram_orders) {
    const auto n = static_cast<size_t>(order);
    for (size_t i = 0; i + n <= words.size(); ++i) {
      std::string key = "w:";
      for (size_t k = 0; k < n; ++k) {
        if (k) key += ' ';
        key += words[i + k];
      }
      out.push_back(std::move(key));
    }
  }
  if (!config.char_ngram_orders.empty()) {
    std::string joined;
    for (size_t i = 0; i < surfaces.size(); ++i) {
      if (i) joined += ' ';
      joined += surfaces[i];
    }
    const auto offs = CodePointOffsets(joined);
    const size_t n_cp = offs.size() - 1;
    for (int order : config.char_ngram_orders) {
      const auto n = static_cast<size_t>(order);
      for (size_t i = 0; i + n <= n_cp; ++i) {
        out.push_back("c:" + joined.substr(offs[i], offs[i + n] - offs[i]));
      }
    }
  }
  return out;
}

FeatureSpace FeatureSpace::Fit(std::span<const Document> docs,
                               const FeatureConfig& config) {
  const auto surfaces = SurfacesOf(docs);
  return Fit(std::span<const std::vector<std::string>>(surfaces), config);
}

FeatureSpace FeatureSpace::Fit(std::span<const std::vector<std::string>> docs,
                               const FeatureConfig& config) {
  config.Validate();
  if (docs.empty()) throw DataError("cannot fit features on an empty corpus");
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    auto grams = ExtractNgrams(d, config);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  const double n = static_cast<double>(docs.size());
  std::vector<std::string> features;
  std::vector<double> idf;
  for (const auto& [gram, count] : df) {
    if (count < config.min_df) continue;
    features.push_back(gram);
    idf.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  return FromParts(config, std::move(features), std::move(idf));
}

FeatureSpace FeatureSpace::FromParts(FeatureConfig config,
                                     std::vector<std::string> features,
                                     std::vector<double> idf) {
  config.Validate();
  if (features.size() != idf.size()) {
    throw DataError("feature/idf length mismatch");
  }
  FeatureSpace space;
  space.config_ = std::move(config);
  space.features_ = std::move(features);
  space.idf_ = std::move(idf);
  space.index_.reserve(space.features_.size());
  for (size_t i = 0; i < space.features_.size(); ++i) {
    if (!(space.idf_[i] > 0.0)) throw DataError("idf must be positive");
    if (!space.index_.emplace(space.features_[i], static_cast<uint32_t>(i)).second) {
      throw DataError("duplicate feature " + space.features_[i]);
    }
  }
  return space;
}

std::optional<uint32_t> FeatureSpace::IndexOf(const std::string& feature) const {
  auto it = index_.find(feature);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector FeatureSpace::Vectorize(std::span<const std::string> surfaces) const {
  std::vector<uint32_t> hits;
  for (const auto& g : ExtractNgrams(surfaces, config_)) {
    if (auto it = index_.find(g); it != index_.end()) hits.push_back(it->second);
  }
  std::sort(hits.begin(), hits.end());
  SparseVector v;
  for (size_t i = 0; i < hits.size();) {
    size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    const double tf = static_cast<double>(j - i);
    const double scaled = config_.sublinear_tf ? 1.0 + std::log(tf) : tf;
    v.indices.push_back(hits[i]);
    v.values.push_back(scaled * idf_[hits[i]]);
    i = j;
  }
  const double norm = v.Norm();
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

SparseVector FeatureSpace::Vectorize(const Document& doc) const {
  const auto s = doc.Surfaces();
  return Vectorize(std::span<const std::string>(s));
}

}  // namespace stylomask
