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

#ifndef STYLOMASK_ATTACK_H_
#define STYLOMASK_ATTACK_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylomask/classifier.h"
#include "stylomask/corpus.h"
#include "stylomask/embeddings.h"
#include "stylomask/lm_provider.h"
#include "stylomask/pos_tagger.h"

namespace stylomask {

enum class Generator { kLeet, kFlip, kSpace, kSynonym, kMasked, kDropout };
enum class AttackMode { kTop1, kLoopNoCheck, kLoopCheck };
enum class Rerank { kNone, kMlmSim };

// Accepts the short names used on the command line: leet, flip, space,
// ws, mb, db / top1, loop_nocheck, loop_check / none, mlm_sim.
Generator ParseGenerator(std::string_view name);
std::string_view GeneratorName(Generator g);
AttackMode ParseAttackMode(std::string_view name);
std::string_view AttackModeName(AttackMode m);
Rerank ParseRerank(std::string_view name);
std::string_view RerankName(Rerank r);

// True for generators that need a language-model provider.
bool NeedsLanguageModel(Generator g);

struct AttackConfig {
  Generator generator = Generator::kSynonym;
  AttackMode mode = AttackMode::kLoopNoCheck;
  size_t k_targets = 50;
  size_t top_k = 10;
  size_t n_synonyms = 50;
  double delta = 0.7;
  double dropout_p = 0.3;
  Rerank rerank = Rerank::kNone;
  uint64_t seed = 0;

  void Validate() const;
};

struct Candidate {
  std::string surface;
  double provider_score = 0.0;
  std::string provider_id;
};

struct Edit {
  size_t position = 0;
  std::string original;
  std::string replacement;

  bool operator==(const Edit&) const = default;
};

struct ImportanceRanking {
  std::string label;              // y
  std::vector<double> scores;     // I_{D_i}, one per token
  std::vector<bool> attackable;   // false for sentinels and punctuation
  bool already_misclassified = false;  // f'(D) != y
  size_t queries = 0;
};

struct SkippedTarget {
  size_t position = 0;
  std::string reason;
};

struct AttackResult {
  Document adversarial;
  std::vector<Edit> edits;
  bool flipped = false;
  bool already_misclassified = false;
  double initial_logit = 0.0;
  double final_logit = 0.0;
  size_t substitute_queries = 0;
  std::vector<size_t> targets;
  std::vector<SkippedTarget> skipped;
};

// Turns token vectors into one document embedding for the similarity check.
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::vector<double> Encode(std::span<const std::string> tokens) const = 0;
};

// L2-normalized mean of the unit word vectors of in-vocabulary words.
class MeanEmbeddingEncoder : public SentenceEncoder {
 public:
  explicit MeanEmbeddingEncoder(const EmbeddingStore& store) : store_(store) {}
  std::vector<double> Encode(std::span<const std::string> tokens) const override;

 private:
  const EmbeddingStore& store_;
};

// Everything a generator or check may need. Pointers may be null when the
// configured generator and mode do not use them.
struct AttackProviders {
  const EmbeddingStore* embeddings = nullptr;
  LmProvider* lm = nullptr;
  const PosTagger* tagger = nullptr;
  const SentenceEncoder* encoder = nullptr;
};

bool IsAttackable(const Token& token);

// Omission-based importance of every token of `doc` for label y:
//   o_y(D) - o_y(D\i)                              if f'(D\i) = y
//   o_y(D) - o_y(D\i) + o_ybar(D) - o_ybar(D\i)   if f'(D\i) = ybar
// where D\i is D with token i deleted and re-vectorized from scratch. When
// f'(D) != y already, the first form is used for every position and the
// ranking is flagged.
ImportanceRanking OmissionScores(const TextClassifier& substitute,
                                 const Document& doc, std::string_view label);

// Attackable positions by descending score (earlier position wins ties), at
// most k of them.
std::vector<size_t> SelectTargets(const ImportanceRanking& ranking,
                                  std::span<const Token> tokens, size_t k);

// ---- candidate generators ----------------------------------------------

std::vector<Candidate> SynonymCandidates(const EmbeddingStore& store,
                                         const std::string& word, size_t n,
                                         double delta);
// Replaces position i with the mask token and asks the provider to fill it.
std::vector<Candidate> MaskedCandidates(LmProvider& lm,
                                        std::span<const std::string> tokens,
                                        size_t i, size_t top_k, uint64_t seed);
// Keeps the original token visible; the provider perturbs its embedding.
std::vector<Candidate> DropoutCandidates(LmProvider& lm,
                                         std::span<const std::string> tokens,
                                         size_t i, size_t top_k, double p,
                                         uint64_t seed);
// Single-candidate heuristics. The random split draws from a generator
// seeded with (seed, position), so it does not depend on visiting order.
std::vector<Candidate> HeuristicCandidates(Generator g, const std::string& word,
                                           size_t position, uint64_t seed);

// Candidates for `tokens[i]` from whichever generator `config` names.
std::vector<Candidate> GenerateCandidates(const AttackConfig& config,
                                          const AttackProviders& providers,
                                          std::span<const std::string> tokens,
                                          size_t i);

// ---- filtering and re-ranking -----------------------------------------

// Keeps candidates whose in-context tag matches the tag of tokens[i].
std::vector<Candidate> PosFilter(std::span<const std::string> tokens, size_t i,
                                 std::span<const Candidate> candidates,
                                 const PosTagger& tagger);

// Index of the chosen variant. Among variants with flipped[j] set, the one
// whose encoding is most similar to the original document; if none flipped,
// the one with the lowest fallback score. Earlier index wins ties.
size_t EncoderSelect(std::span<const std::string> original,
                     std::span<const std::vector<std::string>> variants,
                     const std::vector<bool>& flipped,
                     std::span<const double> fallback_scores,
                     const SentenceEncoder& encoder);

// sum_i w_{i,t} * cos(h(D_i|D), h(D'_i|D')) for every variant, with the
// attention profile of `original` renormalized to sum to one. Variants must
// have the original's length.
std::vector<double> MlmSimScores(LmProvider& lm, std::span<const std::string> original,
                                 std::span<const std::vector<std::string>> variants,
                                 size_t target);
// Variant indices by descending similarity score (stable).
std::vector<size_t> MlmSimRank(LmProvider& lm, std::span<const std::string> original,
                               std::span<const std::vector<std::string>> variants,
                               size_t target);

// ---- driver ------------------------------------------------------------

// Greedy lexical substitution against the substitute model. See README for
// the three modes.
AttackResult RunAttack(const TextClassifier& substitute, const Document& doc,
                       std::string_view label, const AttackConfig& config,
                       const AttackProviders& providers);

// Replays edits on a copy of `doc`. Throws DataError when an edit's original
// surface does not match.
Document ApplyEdits(const Document& doc, std::span<const Edit> edits);

}  // namespace stylomask

#endif  // STYLOMASK_ATTACK_H_
