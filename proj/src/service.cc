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

#include "stylomask/service.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "stylomask/errors.h"
#include "stylomask/eval.h"
#include "stylomask/rng.h"

namespace stylomask {

using nlohmann::json;

void FifoMutex::lock() {
  std::unique_lock lock(mu_);
  const uint64_t ticket = next_ticket_++;
  cv_.wait(lock, [&] { return serving_ == ticket; });
}

void FifoMutex::unlock() {
  {
    std::lock_guard lock(mu_);
    ++serving_;
  }
  cv_.notify_all();
}

std::vector<Edit> CollapseEdits(const std::vector<Edit>& stack) {
  std::vector<Edit> out;
  std::map<size_t, size_t> at;
  for (const auto& e : stack) {
    if (auto it = at.find(e.position); it != at.end()) {
      out[it->second].replacement = e.replacement;
    } else {
      at[e.position] = out.size();
      out.push_back(e);
    }
  }
  return out;
}

SessionManager::SessionManager(ServiceOptions options)
    : options_(std::move(options)), id_salt_(std::random_device{}()) {
  id_salt_ = (id_salt_ << 32) ^ std::random_device{}();
}

void SessionManager::AddModel(const std::string& id,
                              std::shared_ptr<const TextClassifier> model) {
  std::lock_guard lock(mu_);
  models_[id] = std::move(model);
}

void SessionManager::SetEmbeddings(std::shared_ptr<const EmbeddingStore> store) {
  std::lock_guard lock(mu_);
  embeddings_ = std::move(store);
}

void SessionManager::SetProviderFactory(ProviderFactory factory) {
  std::lock_guard lock(mu_);
  provider_factory_ = std::move(factory);
}

std::vector<std::string> SessionManager::ModelIds() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, m] : models_) ids.push_back(id);
  return ids;
}

std::string SessionManager::NewId() {
  SplitMix64 rng(MixSeed(id_salt_, ++id_counter_));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

std::shared_ptr<SessionManager::Session> SessionManager::Find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "no such session: " + id);
  it->second->last_used = options_.now();
  return it->second;
}

void SessionManager::Rebuild(Session& s) {
  s.working = ApplyEdits(s.original, CollapseEdits(s.stack));
  s.importance.reset();
}

json SessionManager::State(const Session& s) const {
  const auto surfaces = s.working.Surfaces();
  const auto x = s.model->Vectorize(surfaces);
  const double logit = s.model->model().Logit(x, s.label);
  const std::string prediction = s.model->model().Predict(x);
  return {{"schema", kServiceSchemaVersion},
          {"session", s.id},
          {"model", s.model_id},
          {"label", s.label},
          {"tokens", surfaces},
          {"prediction", prediction},
          {"logit", logit},
          {"probability", Sigmoid(logit)},
          {"flipped", prediction != s.label},
          {"edit_count", s.stack.size()}};
}

json SessionManager::CreateSession(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "body must be a JSON object");
  const std::string text = body.value("text", "");
  const std::string label = body.value("label", "");
  std::string model_id = body.value("model", "");
  auto session = std::make_shared<Session>();
  {
    std::lock_guard lock(mu_);
    if (model_id.empty()) {
      if (models_.size() != 1) throw ServiceError(400, "name a model");
      model_id = models_.begin()->first;
    }
    auto it = models_.find(model_id);
    if (it == models_.end()) throw ServiceError(404, "no such model: " + model_id);
    session->model = it->second;
  }
  const auto& labels = session->model->model().label_set();
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    throw ServiceError(400, "label must be one of the model's labels");
  }
  session->original.tokens = Preprocess(text);
  if (session->original.tokens.empty()) throw ServiceError(400, "text has no tokens");
  session->original.author_id = "session";
  session->original.label = label;
  session->original.tweet_boundaries = {0};
  session->original.tweet_count = 1;
  session->working = session->original;
  session->label = label;
  session->model_id = model_id;
  EvictExpired();
  {
    std::lock_guard lock(mu_);
    if (sessions_.size() >= options_.max_sessions) throw ServiceError(503, "too many sessions");
    session->id = NewId();
    session->last_used = options_.now();
    sessions_[session->id] = session;
  }
  return State(*session);
}

json SessionManager::Importance(const std::string& id) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (!s->importance) s->importance = OmissionScores(*s->model, s->working, s->label);
  return {{"schema", kServiceSchemaVersion},
          {"session", s->id},
          {"edit_count", s->stack.size()},
          {"stale", false},
          {"scores", s->importance->scores},
          {"attackable", s->importance->attackable},
          {"already_misclassified", s->importance->already_misclassified}};
}

json SessionManager::Candidates(const std::string& id, size_t position,
                                const std::string& generator, size_t top_k) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (position >= s->working.tokens.size()) throw ServiceError(400, "position out of range");
  AttackConfig config;
  try {
    config.generator = ParseGenerator(generator);
  } catch (const ConfigError& e) {
    throw ServiceError(400, e.what());
  }
  config.top_k = top_k;
  config.n_synonyms = top_k;
  AttackProviders providers;
  std::unique_ptr<LmProvider> lm;
  {
    std::lock_guard lock2(mu_);
    providers.embeddings = embeddings_.get();
    if (NeedsLanguageModel(config.generator)) {
      if (!provider_factory_) throw ServiceError(503, "no model server configured");
      try {
        lm = provider_factory_();
      } catch (const ProviderError& e) {
        throw ServiceError(503, e.what());
      }
    }
  }
  providers.lm = lm.get();
  if (config.generator == Generator::kSynonym && !providers.embeddings) {
    throw ServiceError(503, "no embedding store loaded");
  }

  const auto surfaces = s->working.Surfaces();
  std::vector<Candidate> cands;
  try {
    cands = GenerateCandidates(config, providers, surfaces, position);
  } catch (const ProviderError& e) {
    throw ServiceError(503, e.what());
  }
  const auto& model = s->model->model();
  const double before = model.Logit(s->model->Vectorize(surfaces), s->label);
  std::vector<std::string> variant = surfaces;
  json list = json::array();
  auto annotate = [&](const std::string& surface, double score, const std::string& provider,
                      bool identity) {
    variant[position] = surface;
    const auto x = s->model->Vectorize(variant);
    const double after = model.Logit(x, s->label);
    list.push_back({{"surface", surface},
                    {"provider_score", score},
                    {"provider", provider},
                    {"identity", identity},
                    {"logit", after},
                    {"delta_logit", after - before},
                    {"probability", Sigmoid(after)},
                    {"delta_probability", Sigmoid(after) - Sigmoid(before)},
                    {"flips", model.Predict(x) != s->label}});
  };
  annotate(surfaces[position], 0.0, "identity", true);
  for (const auto& c : cands) {
    if (c.surface.empty() || c.surface == surfaces[position]) continue;
    annotate(c.surface, c.provider_score, c.provider_id, false);
  }
  return {{"schema", kServiceSchemaVersion},
          {"session", s->id},
          {"position", position},
          {"generator", GeneratorName(config.generator)},
          {"logit", before},
          {"candidates", list}};
}

json SessionManager::ApplyEdit(const std::string& id, size_t position,
                               const std::string& surface) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (position >= s->original.tokens.size()) throw ServiceError(400, "position out of range");
  if (surface.empty()) throw ServiceError(400, "replacement must not be empty");
  s->stack.push_back({position, s->original.tokens[position].surface, surface});
  Rebuild(*s);
  return State(*s);
}

json SessionManager::Revert(const std::string& id) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  if (!s->stack.empty()) {
    s->stack.pop_back();
    Rebuild(*s);
  }
  return State(*s);
}

void SessionManager::AutoAttack(const std::string& id, const json& body,
                                const std::function<bool(const json&)>& sink) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  AttackConfig config;
  try {
    config = AttackConfigFromJson(body.is_object() ? body : json::object());
  } catch (const ConfigError& e) {
    throw ServiceError(400, e.what());
  }
  AttackProviders providers;
  std::unique_ptr<LmProvider> lm;
  {
    std::lock_guard lock2(mu_);
    providers.embeddings = embeddings_.get();
    if (NeedsLanguageModel(config.generator) || config.rerank == Rerank::kMlmSim) {
      if (!provider_factory_) throw ServiceError(503, "no model server configured");
      try {
        lm = provider_factory_();
      } catch (const ProviderError& e) {
        throw ServiceError(503, e.what());
      }
    }
  }
  providers.lm = lm.get();
  AttackResult result;
  try {
    result = RunAttack(*s->model, s->working, s->label, config, providers);
  } catch (const ConfigError& e) {
    throw ServiceError(400, e.what());
  }
  for (const auto& e : result.edits) {
    if (!sink({{"position", e.position}, {"original", e.original},
               {"replacement", e.replacement}})) {
      return;
    }
  }
  sink({{"done", true},
        {"flipped", result.flipped},
        {"already_misclassified", result.already_misclassified},
        {"final_logit", result.final_logit},
        {"substitute_queries", result.substitute_queries},
        {"suggestions", result.edits.size()}});
}

json SessionManager::Export(const std::string& id) {
  auto s = Find(id);
  std::lock_guard lock(s->mu);
  const auto effective = CollapseEdits(s->stack);
  json log = json::array();
  for (const auto& e : s->stack) {
    log.push_back({{"position", e.position}, {"original", e.original},
                   {"replacement", e.replacement}});
  }
  std::vector<Edit> changed;
  for (const auto& e : effective) {
    if (e.replacement != e.original) changed.push_back(e);
  }
  json state = State(*s);
  state["text"] = s->working.Text();
  state["original_text"] = s->original.Text();
  state["edit_log"] = log;
  state["meteor"] = Meteor(s->original.Surfaces(), s->working.Surfaces());
  state["change_rate"] = ChangeRate(s->original, changed);
  return state;
}

size_t SessionManager::EvictExpired() {
  std::lock_guard lock(mu_);
  const auto now = options_.now();
  size_t evicted = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_used > options_.ttl) {
      it = sessions_.erase(it);
      ++evicted;
    } else {
      ++it;
    }
  }
  return evicted;
}

size_t SessionManager::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace stylomask
