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

#include "stylomask/batch.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "stylomask/errors.h"

namespace stylomask {

using nlohmann::json;

json AttackConfigToJson(const AttackConfig& c) {
  return {{"generator", GeneratorName(c.generator)},
          {"mode", AttackModeName(c.mode)},
          {"k_targets", c.k_targets},
          {"top_k", c.top_k},
          {"n_synonyms", c.n_synonyms},
          {"delta", c.delta},
          {"dropout_p", c.dropout_p},
          {"rerank", RerankName(c.rerank)},
          {"seed", c.seed}};
}

AttackConfig AttackConfigFromJson(const json& j) {
  AttackConfig c;
  try {
    if (j.contains("generator")) c.generator = ParseGenerator(j["generator"].get<std::string>());
    if (j.contains("mode")) c.mode = ParseAttackMode(j["mode"].get<std::string>());
    if (j.contains("rerank")) c.rerank = ParseRerank(j["rerank"].get<std::string>());
    c.k_targets = j.value("k_targets", c.k_targets);
    c.top_k = j.value("top_k", c.top_k);
    c.n_synonyms = j.value("n_synonyms", c.n_synonyms);
    c.delta = j.value("delta", c.delta);
    c.dropout_p = j.value("dropout_p", c.dropout_p);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attack config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::vector<AttackResult> RunAttackBatch(const TextClassifier& substitute,
                                         std::span<const Document> docs,
                                         const AttackConfig& config,
                                         const EmbeddingStore* embeddings,
                                         const ProviderFactory& make_provider,
                                         size_t workers) {
  config.Validate();
  for (const auto& d : docs) {
    if (!d.label) throw DataError("cannot attack an unlabeled document");
  }
  const bool needs_lm = NeedsLanguageModel(config.generator) || config.rerank == Rerank::kMlmSim;
  if (needs_lm && !make_provider) throw ConfigError("this configuration needs a model server");

  std::vector<AttackResult> results(docs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      std::unique_ptr<LmProvider> lm;
      if (needs_lm) lm = make_provider();
      AttackProviders providers;
      providers.embeddings = embeddings;
      providers.lm = lm.get();
      for (size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) {
        results[i] = RunAttack(substitute, docs[i], *docs[i].label, config, providers);
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next.store(docs.size());
    }
  };
  workers = std::clamp<size_t>(workers, 1, std::max<size_t>(docs.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

json AttackRecordToJson(size_t index, const Document& original, const AttackResult& r) {
  json edits = json::array();
  for (const auto& e : r.edits) {
    edits.push_back({{"position", e.position}, {"original", e.original},
                     {"replacement", e.replacement}});
  }
  json skipped = json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back({{"position", s.position}, {"reason", s.reason}});
  }
  return {{"index", index},
          {"original", DocumentToJson(original)},
          {"adversarial", r.adversarial.Surfaces()},
          {"edits", edits},
          {"flipped", r.flipped},
          {"already_misclassified", r.already_misclassified},
          {"initial_logit", r.initial_logit},
          {"final_logit", r.final_logit},
          {"substitute_queries", r.substitute_queries},
          {"targets", r.targets},
          {"skipped", skipped}};
}

void WriteAttackResults(std::ostream& out, std::span<const Document> originals,
                        std::span<const AttackResult> results) {
  if (originals.size() != results.size()) {
    throw ConfigError("originals and results differ in length");
  }
  for (size_t i = 0; i < results.size(); ++i) {
    out << AttackRecordToJson(i, originals[i], results[i]).dump() << '\n';
  }
}

std::vector<AttackedDocument> ReadAttackResults(std::istream& in) {
  std::vector<AttackedDocument> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      AttackedDocument a;
      a.original = DocumentFromJson(j.at("original"));
      for (const auto& e : j.at("edits")) {
        a.edits.push_back({e.at("position").get<size_t>(), e.at("original").get<std::string>(),
                           e.at("replacement").get<std::string>()});
      }
      a.adversarial = ApplyEdits(a.original, a.edits);
      if (a.adversarial.Surfaces() != j.at("adversarial").get<std::vector<std::string>>()) {
        throw DataError("edits do not reproduce the adversarial tokens");
      }
      a.queries = j.value("substitute_queries", size_t{0});
      out.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw DataError("attack results line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("attack results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<AttackedDocument> ReadAttackResultsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ReadAttackResults(in);
}

}  // namespace stylomask
