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

#ifndef STYLOMASK_EVAL_H_
#define STYLOMASK_EVAL_H_

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stylomask/attack.h"
#include "stylomask/classifier.h"
#include "stylomask/corpus.h"
#include "stylomask/lm_provider.h"

namespace stylomask {

// Fraction of labeled documents the model gets right. Throws DataError on an
// empty set or an unlabeled document.
double Accuracy(const TextClassifier& model, std::span<const Document> docs);

// Majority-class prior of the labeled documents.
double ChanceLevel(std::span<const Document> docs);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

// Exact-match METEOR without stemming or synonyms. The alignment takes the
// longest common block, recurses on both sides of it, then pairs leftover
// equal tokens in order. Empty input scores 0.
double Meteor(std::span<const std::string> reference,
              std::span<const std::string> hypothesis,
              const MeteorParams& params = {});

// Token vectors for a sequence, one per token.
using TokenEncoder =
    std::function<std::vector<std::vector<double>>(std::span<const std::string>)>;

// Uses the contextual vectors of an LM provider (target index 0).
TokenEncoder ProviderTokenEncoder(LmProvider& lm);

struct EncodingScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Every hypothesis token is matched to its most similar reference token
// (precision) and vice versa (recall). No idf weighting, no rescaling.
EncodingScore EncodingF1(std::span<const std::string> reference,
                         std::span<const std::string> hypothesis,
                         const TokenEncoder& encode);

// |edits| / |D|; 0 for an empty document.
double ChangeRate(const Document& original, std::span<const Edit> edits);

// One row of the report grid.
struct ConditionResult {
  std::string condition;          // e.g. "unattacked", "ws/loop_nocheck"
  std::string substitute_corpus;
  std::string target_model;
  double substitute_pre = 0.0;    // accuracy of f' before / after
  double substitute_post = 0.0;
  double target_pre = 0.0;        // accuracy of f before / after
  double target_post = 0.0;
  double chance = 0.0;
  double change_rate = 0.0;       // macro average over documents
  double meteor = 0.0;
  double encoding_f1 = 0.0;
  double queries = 0.0;           // mean substitute queries per document
  size_t n_docs = 0;

  bool success() const { return target_post <= chance; }
};

struct AttackedDocument {
  Document original;
  Document adversarial;
  std::vector<Edit> edits;
  size_t queries = 0;
};

// Scores one attack condition. `substitute` may be null, in which case the
// substitute columns are left at zero. `encode` may be empty to skip
// encoding F1.
ConditionResult EvaluateCondition(std::string condition, std::string substitute_corpus,
                                  std::string target_model,
                                  const TextClassifier* substitute,
                                  const TextClassifier& target,
                                  std::span<const AttackedDocument> docs,
                                  const TokenEncoder& encode,
                                  const MeteorParams& params = {});

// Machine-readable grid: '#' header lines with the schema version and metric
// parameters, then one tab-separated row per condition.
void WriteReportTsv(std::ostream& out, std::span<const ConditionResult> rows,
                    const MeteorParams& params = {});
std::vector<ConditionResult> ReadReportTsv(std::istream& in);
// Fixed-width table for people.
std::string FormatReportTable(std::span<const ConditionResult> rows);

}  // namespace stylomask

#endif  // STYLOMASK_EVAL_H_
