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

#include "stylomask/attack.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "stylomask/errors.h"
#include "stylomask/heuristics.h"
#include "stylomask/rng.h"

namespace stylomask {
namespace {

// Counts every vectorize-and-score call made against the substitute model.
class SubstituteOracle {
 public:
  SubstituteOracle(const TextClassifier& model, std::string_view label)
      : model_(model), label_(label) {}

  struct Verdict {
    double logit;  // o_y
    bool is_label; // argmax is y
  };

  Verdict Query(std::span<const std::string> surfaces) {
    ++queries_;
    const auto x = model_.Vectorize(surfaces);
    return {model_.model().Logit(x, label_), model_.model().Predict(x) == label_};
  }

  size_t queries() const { return queries_; }

 private:
  const TextClassifier& model_;
  std::string label_;
  size_t queries_ = 0;
};

std::vector<std::string> Without(std::span<const std::string> s, size_t i) {
  std::vector<std::string> out;
  out.reserve(s.size() - 1);
  out.insert(out.end(), s.begin(), s.begin() + static_cast<ptrdiff_t>(i));
  out.insert(out.end(), s.begin() + static_cast<ptrdiff_t>(i) + 1, s.end());
  return out;
}

const LexiconTagger& DefaultTagger() {
  static const LexiconTagger tagger;
  return tagger;
}

void RecordEdit(AttackResult& result, std::map<size_t, size_t>& edit_at,
                const Document& doc, size_t position, const std::string& replacement) {
  if (auto it = edit_at.find(position); it != edit_at.end()) {
    result.edits[it->second].replacement = replacement;
    return;
  }
  edit_at[position] = result.edits.size();
  result.edits.push_back({position, doc.tokens[position].surface, replacement});
}

}  // namespace

Generator ParseGenerator(std::string_view name) {
  if (name == "leet") return Generator::kLeet;
  if (name == "flip") return Generator::kFlip;
  if (name == "space") return Generator::kSpace;
  if (name == "ws" || name == "WS" || name == "synonym") return Generator::kSynonym;
  if (name == "mb" || name == "MB" || name == "masked") return Generator::kMasked;
  if (name == "db" || name == "DB" || name == "dropout") return Generator::kDropout;
  throw ConfigError("unknown generator: " + std::string(name));
}

std::string_view GeneratorName(Generator g) {
  switch (g) {
    case Generator::kLeet: return "leet";
    case Generator::kFlip: return "flip";
    case Generator::kSpace: return "space";
    case Generator::kSynonym: return "ws";
    case Generator::kMasked: return "mb";
    case Generator::kDropout: return "db";
  }
  return "ws";
}

AttackMode ParseAttackMode(std::string_view name) {
  if (name == "top1") return AttackMode::kTop1;
  if (name == "loop_nocheck" || name == "nocheck") return AttackMode::kLoopNoCheck;
  if (name == "loop_check" || name == "check") return AttackMode::kLoopCheck;
  throw ConfigError("unknown attack mode: " + std::string(name));
}

std::string_view AttackModeName(AttackMode m) {
  switch (m) {
    case AttackMode::kTop1: return "top1";
    case AttackMode::kLoopNoCheck: return "loop_nocheck";
    case AttackMode::kLoopCheck: return "loop_check";
  }
  return "loop_nocheck";
}

Rerank ParseRerank(std::string_view name) {
  if (name == "none") return Rerank::kNone;
  if (name == "mlm_sim") return Rerank::kMlmSim;
  throw ConfigError("unknown rerank: " + std::string(name));
}

std::string_view RerankName(Rerank r) {
  return r == Rerank::kNone ? "none" : "mlm_sim";
}

bool NeedsLanguageModel(Generator g) {
  return g == Generator::kMasked || g == Generator::kDropout;
}

void AttackConfig::Validate() const {
  if (!(delta >= -1.0 && delta <= 1.0)) throw ConfigError("delta must lie in [-1, 1]");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw ConfigError("dropout_p must lie in [0, 1)");
  }
}

bool IsAttackable(const Token& token) { return token.kind == TokenKind::kWord; }

std::vector<double> MeanEmbeddingEncoder::Encode(std::span<const std::string> tokens) const {
  std::vector<double> sum(store_.dimension(), 0.0);
  for (const auto& w : FeatureWords(tokens)) {
    if (auto idx = store_.IndexOf(w)) {
      const auto u = store_.Unit(*idx);
      for (size_t k = 0; k < sum.size(); ++k) sum[k] += u[k];
    }
  }
  NormalizeInPlace(sum);
  return sum;
}

ImportanceRanking OmissionScores(const TextClassifier& substitute,
                                 const Document& doc, std::string_view label) {
  const auto& model = substitute.model();
  const std::string y(label);
  const std::string ybar = model.Other(y);
  const auto surfaces = doc.Surfaces();

  ImportanceRanking ranking;
  ranking.label = y;
  ranking.scores.resize(surfaces.size(), 0.0);
  ranking.attackable.resize(surfaces.size());
  for (size_t i = 0; i < surfaces.size(); ++i) {
    ranking.attackable[i] = IsAttackable(doc.tokens[i]);
  }

  const auto x = substitute.Vectorize(surfaces);
  ++ranking.queries;
  const double oy = model.Logit(x, y);
  const double oybar = model.Logit(x, ybar);
  ranking.already_misclassified = model.Predict(x) != y;

  for (size_t i = 0; i < surfaces.size(); ++i) {
    const auto reduced = Without(surfaces, i);
    const auto xi = substitute.Vectorize(reduced);
    ++ranking.queries;
    const double oy_i = model.Logit(xi, y);
    double score = oy - oy_i;
    if (!ranking.already_misclassified && model.Predict(xi) != y) {
      score += oybar - model.Logit(xi, ybar);
    }
    ranking.scores[i] = score;
  }
  return ranking;
}

std::vector<size_t> SelectTargets(const ImportanceRanking& ranking,
                                  std::span<const Token> tokens, size_t k) {
  std::vector<size_t> order;
  for (size_t i = 0; i < ranking.scores.size(); ++i) {
    const bool attackable = i < ranking.attackable.size()
                                ? ranking.attackable[i]
                                : (i < tokens.size() && IsAttackable(tokens[i]));
    if (attackable) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ranking.scores[a] > ranking.scores[b];
  });
  if (order.size() > k) order.resize(k);
  return order;
}

std::vector<Candidate> SynonymCandidates(const EmbeddingStore& store,
                                         const std::string& word, size_t n,
                                         double delta) {
  std::vector<Candidate> out;
  for (auto& [w, sim] : store.Nearest(word, n, delta)) {
    out.push_back({std::move(w), sim, "ws"});
  }
  return out;
}

std::vector<Candidate> MaskedCandidates(LmProvider& lm,
                                        std::span<const std::string> tokens,
                                        size_t i, size_t top_k, uint64_t seed) {
  if (top_k == 0) return {};
  FillRequest req;
  req.kind = FillKind::kMask;
  req.tokens.assign(tokens.begin(), tokens.end());
  req.tokens[i] = std::string(kMaskToken);
  req.target_index = i;
  req.top_k = top_k;
  req.seed = seed;
  std::vector<Candidate> out;
  for (auto& c : lm.Fill(req).candidates) {
    if (c.surface == kMaskToken || c.surface.empty()) continue;
    out.push_back({std::move(c.surface), c.score, "mb"});
  }
  return out;
}

std::vector<Candidate> DropoutCandidates(LmProvider& lm,
                                         std::span<const std::string> tokens,
                                         size_t i, size_t top_k, double p,
                                         uint64_t seed) {
  if (top_k == 0) return {};
  FillRequest req;
  req.kind = FillKind::kDropout;
  req.tokens.assign(tokens.begin(), tokens.end());
  req.target_index = i;
  req.top_k = top_k;
  req.dropout_p = p;
  req.seed = seed;
  std::vector<Candidate> out;
  for (auto& c : lm.Fill(req).candidates) {
    if (c.surface == kMaskToken || c.surface.empty()) continue;
    out.push_back({std::move(c.surface), c.score, "db"});
  }
  return out;
}

std::vector<Candidate> HeuristicCandidates(Generator g, const std::string& word,
                                           size_t position, uint64_t seed) {
  std::string out;
  switch (g) {
    case Generator::kLeet: out = Leet(word); break;
    case Generator::kFlip: out = Flip(word); break;
    case Generator::kSpace: {
      SplitMix64 rng(MixSeed(seed, position));
      out = RandomSpace(word, rng);
      break;
    }
    default: throw ConfigError("not a heuristic generator");
  }
  if (out == word) return {};
  return {{std::move(out), 1.0, std::string(GeneratorName(g))}};
}

std::vector<Candidate> GenerateCandidates(const AttackConfig& config,
                                          const AttackProviders& providers,
                                          std::span<const std::string> tokens,
                                          size_t i) {
  switch (config.generator) {
    case Generator::kLeet:
    case Generator::kFlip:
    case Generator::kSpace:
      return HeuristicCandidates(config.generator, tokens[i], i, config.seed);
    case Generator::kSynonym:
      if (!providers.embeddings) throw ConfigError("the ws generator needs an embedding store");
      return SynonymCandidates(*providers.embeddings, tokens[i], config.n_synonyms,
                               config.delta);
    case Generator::kMasked:
      if (!providers.lm) throw ConfigError("the mb generator needs a model server");
      return MaskedCandidates(*providers.lm, tokens, i, config.top_k, config.seed);
    case Generator::kDropout:
      if (!providers.lm) throw ConfigError("the db generator needs a model server");
      return DropoutCandidates(*providers.lm, tokens, i, config.top_k,
                               config.dropout_p, config.seed);
  }
  return {};
}

std::vector<Candidate> PosFilter(std::span<const std::string> tokens, size_t i,
                                 std::span<const Candidate> candidates,
                                 const PosTagger& tagger) {
  std::vector<Candidate> out;
  if (candidates.empty()) return out;
  const PosTag original = tagger.Tag(tokens, i);
  std::vector<std::string> context(tokens.begin(), tokens.end());
  for (const auto& c : candidates) {
    if (c.surface == tokens[i]) {
      out.push_back(c);
      continue;
    }
    context[i] = c.surface;
    if (tagger.Tag(context, i) == original) out.push_back(c);
  }
  return out;
}

size_t EncoderSelect(std::span<const std::string> original,
                     std::span<const std::vector<std::string>> variants,
                     const std::vector<bool>& flipped,
                     std::span<const double> fallback_scores,
                     const SentenceEncoder& encoder) {
  if (variants.empty()) throw ConfigError("EncoderSelect needs at least one variant");
  if (flipped.size() != variants.size() || fallback_scores.size() != variants.size()) {
    throw ConfigError("EncoderSelect: variant/flag/score length mismatch");
  }
  std::optional<size_t> best;
  double best_sim = 0.0;
  std::vector<double> reference;
  for (size_t j = 0; j < variants.size(); ++j) {
    if (!flipped[j]) continue;
    if (reference.empty()) reference = encoder.Encode(original);
    const double sim = Cosine(reference, encoder.Encode(variants[j]));
    if (!best || sim > best_sim) {
      best = j;
      best_sim = sim;
    }
  }
  if (best) return *best;
  size_t lowest = 0;
  for (size_t j = 1; j < variants.size(); ++j) {
    if (fallback_scores[j] < fallback_scores[lowest]) lowest = j;
  }
  return lowest;
}

std::vector<double> MlmSimScores(LmProvider& lm, std::span<const std::string> original,
                                 std::span<const std::vector<std::string>> variants,
                                 size_t target) {
  EncodeRequest req;
  req.tokens.assign(original.begin(), original.end());
  req.target_index = target;
  const EncodeResponse base = lm.Encode(req);
  std::vector<double> weights = base.attention;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ProviderError("attention profile sums to zero");
  for (double& w : weights) w /= total;

  std::vector<double> scores;
  scores.reserve(variants.size());
  for (const auto& v : variants) {
    if (v.size() != original.size()) {
      throw ConfigError("similarity re-ranking needs equal-length variants");
    }
    req.tokens = v;
    const EncodeResponse enc = lm.Encode(req);
    double s = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      s += weights[i] * Cosine(base.vectors[i], enc.vectors[i]);
    }
    scores.push_back(s);
  }
  return scores;
}

std::vector<size_t> MlmSimRank(LmProvider& lm, std::span<const std::string> original,
                               std::span<const std::vector<std::string>> variants,
                               size_t target) {
  const auto scores = MlmSimScores(lm, original, variants, target);
  std::vector<size_t> order(variants.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

AttackResult RunAttack(const TextClassifier& substitute, const Document& doc,
                       std::string_view label, const AttackConfig& config,
                       const AttackProviders& providers) {
  config.Validate();
  const bool check = config.mode == AttackMode::kLoopCheck;
  if (config.generator == Generator::kSynonym && !providers.embeddings) {
    throw ConfigError("the ws generator needs an embedding store");
  }
  if ((NeedsLanguageModel(config.generator) || config.rerank == Rerank::kMlmSim) &&
      !providers.lm) {
    throw ConfigError("this configuration needs a model server");
  }
  const PosTagger& tagger = providers.tagger ? *providers.tagger : DefaultTagger();
  std::optional<MeanEmbeddingEncoder> default_encoder;
  const SentenceEncoder* encoder = providers.encoder;
  if (check && !encoder) {
    if (!providers.embeddings) {
      throw ConfigError("loop_check needs a sentence encoder or an embedding store");
    }
    default_encoder.emplace(*providers.embeddings);
    encoder = &*default_encoder;
  }

  SubstituteOracle oracle(substitute, label);
  AttackResult result;
  result.adversarial = doc;
  const auto original = doc.Surfaces();
  std::vector<std::string> adv = original;

  const auto start = oracle.Query(adv);
  result.initial_logit = result.final_logit = start.logit;
  if (!start.is_label) {
    result.already_misclassified = true;
    result.flipped = true;
    result.substitute_queries = oracle.queries();
    return result;
  }
  if (doc.tokens.empty()) {
    result.substitute_queries = oracle.queries();
    return result;
  }

  const ImportanceRanking ranking = OmissionScores(substitute, doc, label);
  result.targets = SelectTargets(ranking, doc.tokens, config.k_targets);

  std::map<size_t, size_t> edit_at;
  double current = start.logit;
  bool done = false;

  for (size_t t : result.targets) {
    if (done) break;
    std::vector<Candidate> cands;
    try {
      cands = GenerateCandidates(config, providers, adv, t);
    } catch (const ProviderError& e) {
      result.skipped.push_back({t, e.what()});
      continue;
    }
    std::set<std::string> seen;
    std::erase_if(cands, [&](const Candidate& c) {
      return c.surface.empty() || c.surface == adv[t] || !seen.insert(c.surface).second;
    });
    if (check) cands = PosFilter(adv, t, cands, tagger);
    if (cands.empty()) continue;

    if (config.mode == AttackMode::kTop1) {
      adv[t] = cands.front().surface;
      RecordEdit(result, edit_at, doc, t, adv[t]);
      continue;
    }

    std::vector<std::vector<std::string>> variants(cands.size(), adv);
    for (size_t j = 0; j < cands.size(); ++j) variants[j][t] = cands[j].surface;

    std::vector<size_t> order(cands.size());
    std::iota(order.begin(), order.end(), size_t{0});
    if (config.rerank == Rerank::kMlmSim) {
      try {
        order = MlmSimRank(*providers.lm, original, variants, t);
      } catch (const ProviderError& e) {
        result.skipped.push_back({t, e.what()});
        continue;
      }
    }

    if (check) {
      std::vector<std::vector<std::string>> ordered;
      std::vector<bool> flips;
      std::vector<double> logits;
      for (size_t j : order) {
        ordered.push_back(variants[j]);
        const auto v = oracle.Query(variants[j]);
        flips.push_back(!v.is_label);
        logits.push_back(v.logit);
      }
      const bool any_flip = std::find(flips.begin(), flips.end(), true) != flips.end();
      std::vector<double> fallback(ordered.size(), 0.0);
      if (!any_flip) {
        // Omission score of the substituted word inside each variant. The
        // deleted document is the same for all of them.
        const double without = oracle.Query(Without(adv, t)).logit;
        for (size_t j = 0; j < ordered.size(); ++j) fallback[j] = logits[j] - without;
      }
      const size_t pick = EncoderSelect(original, ordered, flips, fallback, *encoder);
      if (any_flip) {
        adv = ordered[pick];
        current = logits[pick];
        RecordEdit(result, edit_at, doc, t, adv[t]);
        done = true;
      } else if (logits[pick] < current) {
        adv = ordered[pick];
        current = logits[pick];
        RecordEdit(result, edit_at, doc, t, adv[t]);
      }
      continue;
    }

    for (size_t j : order) {
      const auto v = oracle.Query(variants[j]);
      if (!v.is_label) {
        adv = variants[j];
        current = v.logit;
        RecordEdit(result, edit_at, doc, t, adv[t]);
        done = true;
        break;
      }
      if (v.logit < current) {
        adv[t] = cands[j].surface;
        current = v.logit;
        RecordEdit(result, edit_at, doc, t, adv[t]);
      }
    }
  }

  if (config.mode == AttackMode::kTop1) {
    const auto end = oracle.Query(adv);
    current = end.logit;
    result.flipped = !end.is_label;
  } else {
    result.flipped = done;
  }
  result.final_logit = current;
  result.adversarial = ApplyEdits(doc, result.edits);
  result.substitute_queries = oracle.queries() + ranking.queries;
  return result;
}

Document ApplyEdits(const Document& doc, std::span<const Edit> edits) {
  Document out = doc;
  for (const auto& e : edits) {
    if (e.position >= doc.tokens.size()) throw DataError("edit position out of range");
    if (doc.tokens[e.position].surface != e.original) {
      throw DataError("edit at " + std::to_string(e.position) +
                      " does not match the original token");
    }
    out.tokens[e.position] = ClassifySurface(e.replacement);
  }
  return out;
}

}  // namespace stylomask
