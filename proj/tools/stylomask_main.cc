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

// Command-line entry point: prepare, train, attack, eval, synth, toy-lm and
// serve. Exit codes: 0 ok, 1 usage/config, 2 data, 3 model server.

#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "stylomask/attack.h"
#include "stylomask/batch.h"
#include "stylomask/classifier.h"
#include "stylomask/corpus.h"
#include "stylomask/errors.h"
#include "stylomask/eval.h"
#include "stylomask/http_service.h"
#include "stylomask/lm_client.h"
#include "stylomask/lm_server.h"
#include "stylomask/service.h"
#include "stylomask/synth.h"
#include "stylomask/toy_lm.h"

namespace stylomask {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kProvider = 3 };

// Shares one in-process toy model between workers ("toy:<vocab file>").
class SharedToy : public LmProvider {
 public:
  explicit SharedToy(std::shared_ptr<ToyLm> lm) : lm_(std::move(lm)) {}
  FillResponse Fill(const FillRequest& r) override { return lm_->Fill(r); }
  EncodeResponse Encode(const EncodeRequest& r) override { return lm_->Encode(r); }

 private:
  std::shared_ptr<ToyLm> lm_;
};

ProviderFactory MakeFactory(const std::string& endpoint) {
  if (endpoint.empty()) return {};
  if (endpoint.rfind("toy:", 0) == 0) {
    auto lm = std::make_shared<ToyLm>(ToyLm::FromVocabularyFile(endpoint.substr(4)));
    return [lm]() -> std::unique_ptr<LmProvider> { return std::make_unique<SharedToy>(lm); };
  }
  return [endpoint]() -> std::unique_ptr<LmProvider> { return LmClient::Connect(endpoint); };
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

// Everything needed to repeat the run; no timestamps, so identical runs
// produce identical manifests.
void WriteManifest(const std::string& out_path, const std::string& command,
                   const json& config, const json& inputs, const json& outputs) {
  json m = {{"tool", "stylomask"},
            {"version", kToolVersion},
            {"command", command},
            {"config", config},
            {"inputs", inputs},
            {"outputs", outputs}};
  WriteFile(out_path + ".manifest.json", m.dump(2) + "\n");
}

FeatureConfig FeaturesByName(const std::string& name) {
  if (name == "word") return FeatureConfig::WordUniBigram();
  if (name == "ngram") return FeatureConfig::NGram();
  throw ConfigError("unknown feature set: " + name + " (word, ngram)");
}

// ---- prepare --------------------------------------------------------------

struct PrepareArgs {
  std::string input, out_prefix;
  size_t max_tweets = 100;
  double train_fraction = 0.8;
  size_t sample = 200;
};

int RunPrepare(const PrepareArgs& a) {
  auto tweets = ReadTweetsFile(a.input);
  std::string name = fs::path(a.input).stem().string();
  const Corpus corpus = BuildCorpus(name, tweets, a.max_tweets);
  auto [train, test] = SplitCorpus(corpus, a.train_fraction);
  SaveDocumentsFile(a.out_prefix + ".all.jsonl", corpus);
  SaveDocumentsFile(a.out_prefix + ".train.jsonl", train);
  SaveDocumentsFile(a.out_prefix + ".test.jsonl", test);
  json outputs = {a.out_prefix + ".all.jsonl", a.out_prefix + ".train.jsonl",
                  a.out_prefix + ".test.jsonl"};
  if (a.sample > 0) {
    Corpus sample{corpus.name, corpus.label_set, SampleAttackSet(test, a.sample)};
    SaveDocumentsFile(a.out_prefix + ".sample.jsonl", sample);
    outputs.push_back(a.out_prefix + ".sample.jsonl");
  }
  WriteManifest(a.out_prefix, "prepare",
                {{"max_tweets", a.max_tweets}, {"train_fraction", a.train_fraction},
                 {"sample", a.sample}},
                {a.input}, outputs);
  std::cout << corpus.size() << " documents: " << train.size() << " train, " << test.size()
            << " test\n";
  return kOk;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string corpus, kind = "logistic", features = "word", out;
  double C = 1.0;
  double train_fraction = 0.8;
};

int RunTrain(const TrainArgs& a) {
  if (!(a.train_fraction > 0.0 && a.train_fraction <= 1.0)) {
    throw ConfigError("train-fraction must lie in (0, 1]");
  }
  const Corpus corpus = LoadCorpusFile(a.corpus);
  std::vector<Document> train = corpus.documents, held;
  if (a.train_fraction < 1.0) {
    auto [tr, te] = SplitCorpus(corpus, a.train_fraction);
    train = tr.documents;
    held = te.documents;
  }
  TrainSpec spec{ParseLossKind(a.kind), FeaturesByName(a.features), a.C};
  const TextClassifier model = TrainTextClassifier(train, spec);
  model.SaveFile(a.out);
  json config = {{"kind", LossKindName(spec.kind)},
                 {"features", a.features},
                 {"C", a.C},
                 {"train_fraction", a.train_fraction}};
  if (!held.empty()) {
    const double acc = Accuracy(model, held);
    std::cout << "held-out accuracy " << acc << " on " << held.size() << " documents\n";
  }
  std::cout << "features " << model.space().dimension() << ", trained on " << train.size()
            << " documents\n";
  WriteManifest(a.out, "train", config, {a.corpus}, {a.out});
  return kOk;
}

// ---- attack --------------------------------------------------------------

struct AttackArgs {
  std::string model, docs, out, embeddings, lm;
  std::string generator = "ws", mode = "loop_nocheck", rerank = "none";
  size_t k_targets = 50, top_k = 10, n_synonyms = 50;
  double delta = 0.7, dropout_p = 0.3;
  uint64_t seed = 0;
  size_t sample = 0;
  size_t workers = 0;
};

int RunAttackCmd(const AttackArgs& a) {
  AttackConfig config;
  config.generator = ParseGenerator(a.generator);
  config.mode = ParseAttackMode(a.mode);
  config.rerank = ParseRerank(a.rerank);
  config.k_targets = a.k_targets;
  config.top_k = a.top_k;
  config.n_synonyms = a.n_synonyms;
  config.delta = a.delta;
  config.dropout_p = a.dropout_p;
  config.seed = a.seed;
  config.Validate();
  if ((NeedsLanguageModel(config.generator) || config.rerank == Rerank::kMlmSim) &&
      a.lm.empty()) {
    throw ConfigError("generator " + a.generator + " needs --lm");
  }
  if (config.generator == Generator::kSynonym && a.embeddings.empty()) {
    throw ConfigError("generator ws needs --embeddings");
  }
  if (config.mode == AttackMode::kLoopCheck && a.embeddings.empty()) {
    throw ConfigError("loop_check needs --embeddings for the sentence encoder");
  }

  const TextClassifier model = TextClassifier::LoadFile(a.model);
  const Corpus corpus = LoadCorpusFile(a.docs);
  std::vector<Document> docs =
      a.sample > 0 ? SampleAttackSet(corpus, a.sample) : corpus.documents;
  std::optional<EmbeddingStore> store;
  if (!a.embeddings.empty()) store = EmbeddingStore::LoadFile(a.embeddings);
  const size_t workers =
      a.workers > 0 ? a.workers : std::max(1u, std::thread::hardware_concurrency());

  const auto results = RunAttackBatch(model, docs, config, store ? &*store : nullptr,
                                      MakeFactory(a.lm), workers);
  std::ostringstream out;
  WriteAttackResults(out, docs, results);
  WriteFile(a.out, out.str());

  size_t flipped = 0, edits = 0;
  for (const auto& r : results) {
    flipped += r.flipped ? 1 : 0;
    edits += r.edits.size();
  }
  std::cout << "attacked " << docs.size() << " documents: " << flipped
            << " flipped on the substitute, " << edits << " edits\n";
  json inputs = {{"model", a.model}, {"docs", a.docs}, {"embeddings", a.embeddings},
                 {"lm", a.lm}};
  json cfg = AttackConfigToJson(config);
  cfg["sample"] = a.sample;
  WriteManifest(a.out, "attack", cfg, inputs, {a.out});
  return kOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string target, substitute, docs, out, lm;
  std::string condition, substitute_corpus = "-", target_name = "-";
  bool append = false;
  bool no_encoding = false;
};

std::vector<AttackedDocument> LoadAttacked(const std::string& path, bool& is_store) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string first;
  std::getline(in, first);
  bool store = false;
  try {
    store = !first.empty() && json::parse(first).value("format", "") == "stylomask-docs";
  } catch (const json::exception&) {
    throw DataError(path + ": not a JSON-lines file");
  }
  is_store = store;
  if (!store) return ReadAttackResultsFile(path);
  std::vector<AttackedDocument> out;
  for (auto& d : LoadCorpusFile(path).documents) out.push_back({d, d, {}, 0});
  return out;
}

int RunEval(const EvalArgs& a) {
  const TextClassifier target = TextClassifier::LoadFile(a.target);
  std::optional<TextClassifier> substitute;
  if (!a.substitute.empty()) substitute = TextClassifier::LoadFile(a.substitute);
  bool is_store = false;
  const auto docs = LoadAttacked(a.docs, is_store);
  if (docs.empty()) throw DataError(a.docs + " holds no documents");
  const std::string condition =
      !a.condition.empty() ? a.condition : is_store ? "unattacked" : "attacked";

  std::unique_ptr<LmProvider> lm;
  std::string encoder_name = "none";
  if (!a.no_encoding) {
    if (a.lm.empty()) {
      lm = std::make_unique<ToyLm>(std::vector<std::string>{});
      encoder_name = "toy-" + std::to_string(ToyLm::kDefaultDim);
    } else {
      lm = MakeFactory(a.lm)();
      encoder_name = a.lm;
    }
  }
  TokenEncoder encode = lm ? ProviderTokenEncoder(*lm) : TokenEncoder{};
  auto row = EvaluateCondition(condition, a.substitute_corpus, a.target_name,
                               substitute ? &*substitute : nullptr, target, docs, encode);

  std::vector<ConditionResult> rows;
  if (a.append && fs::exists(a.out)) {
    std::ifstream in(a.out);
    rows = ReadReportTsv(in);
  }
  rows.push_back(row);
  std::ostringstream tsv;
  WriteReportTsv(tsv, rows);
  WriteFile(a.out, tsv.str());
  const std::string table = FormatReportTable(rows);
  WriteFile(a.out + ".txt", table);
  std::cout << table;
  WriteManifest(a.out, "eval",
                {{"condition", condition},
                 {"substitute_corpus", a.substitute_corpus},
                 {"target_name", a.target_name},
                 {"encoder", encoder_name},
                 {"append", a.append}},
                {{"target", a.target}, {"substitute", a.substitute}, {"docs", a.docs}},
                {a.out, a.out + ".txt"});
  return kOk;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string config_file, out_dir;
  SynthConfig config;
};

int RunSynth(SynthArgs a) {
  if (!a.config_file.empty()) {
    std::ifstream in(a.config_file);
    if (!in) throw DataError("cannot open " + a.config_file);
    try {
      a.config = SynthConfig::FromJson(json::parse(in));
    } catch (const json::exception& e) {
      throw ConfigError(a.config_file + ": " + e.what());
    }
  }
  const SynthOutput out = GenerateSynthetic(a.config);
  fs::create_directories(a.out_dir);
  const std::string dir = a.out_dir + "/";
  std::ostringstream s, t, v;
  WriteTweets(s, out.substitute);
  WriteTweets(t, out.target);
  for (const auto& w : out.vocabulary) v << w << '\n';
  WriteFile(dir + "substitute.jsonl", s.str());
  WriteFile(dir + "target.jsonl", t.str());
  WriteFile(dir + "vocab.txt", v.str());
  out.embeddings.SaveFile(dir + "embeddings.txt");
  json markers = {{"markers", out.markers}, {"decoys", out.decoys}};
  WriteFile(dir + "markers.json", markers.dump(2) + "\n");
  WriteManifest(dir + "synth", "synth", a.config.ToJson(), {{"config", a.config_file}},
                {dir + "substitute.jsonl", dir + "target.jsonl", dir + "vocab.txt",
                 dir + "embeddings.txt", dir + "markers.json"});
  std::cout << out.substitute.size() << " substitute tweets, " << out.target.size()
            << " target tweets, " << out.embeddings.size() << " word vectors\n";
  return kOk;
}

// ---- toy-lm --------------------------------------------------------------

struct ToyArgs {
  std::string vocab, host = "127.0.0.1";
  int port = 0;
  size_t dim = ToyLm::kDefaultDim;
  bool stdio = false;
};

int RunToyLm(const ToyArgs& a) {
  ToyLm lm = ToyLm::FromVocabularyFile(a.vocab, a.dim);
  LmServer server(lm, "stylomask-toy-lm", a.dim);
  if (a.stdio) {
    server.ServeConnection(0, 1);
    return kOk;
  }
  const uint16_t port = server.Listen(a.host, static_cast<uint16_t>(a.port));
  std::cout << "listening on " << a.host << ":" << port << std::endl;
  server.Run();
  return kOk;
}

// ---- serve ---------------------------------------------------------------

struct ServeArgs {
  std::vector<std::string> models;
  std::string embeddings, lm, host = "127.0.0.1";
  int port = 8080;
  int ttl = 1800;
};

int RunServe(const ServeArgs& a) {
  ServiceOptions options;
  options.ttl = std::chrono::seconds(a.ttl);
  SessionManager manager(options);
  for (const auto& spec : a.models) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? fs::path(spec).stem().string()
                                                     : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    manager.AddModel(name, std::make_shared<TextClassifier>(TextClassifier::LoadFile(path)));
  }
  if (!a.embeddings.empty()) {
    manager.SetEmbeddings(
        std::make_shared<EmbeddingStore>(EmbeddingStore::LoadFile(a.embeddings)));
  }
  manager.SetProviderFactory(MakeFactory(a.lm));
  httplib::Server server;
  RegisterRoutes(server, manager);
  const int port = a.port == 0 ? server.bind_to_any_port(a.host) : a.port;
  if (a.port != 0 && !server.bind_to_port(a.host, a.port)) {
    throw ProviderError("cannot bind " + a.host + ":" + std::to_string(a.port));
  }
  if (port < 0) throw ProviderError("cannot bind " + a.host);
  std::cout << "serving on http://" << a.host << ":" << port << std::endl;
  server.listen_after_bind();
  return kOk;
}

int Main(int argc, char** argv) {
  ::signal(SIGPIPE, SIG_IGN);
  CLI::App app{"Lexical-substitution obfuscation toolkit"};
  app.set_config("--config", "", "TOML-style key = value file; flags override it");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Chunk and split a tweet file");
  prepare->add_option("--input", prep.input, "Tweet JSON-lines file")->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", prep.out_prefix, "Output prefix")->required();
  prepare->add_option("--max-tweets", prep.max_tweets, "Tweets per document")->check(CLI::PositiveNumber);
  prepare->add_option("--train-fraction", prep.train_fraction)->check(CLI::Range(0.0, 1.0));
  prepare->add_option("--sample", prep.sample, "Attack sample size (0 to skip)");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train a classifier");
  train->add_option("--corpus", tr.corpus, "Tweet file or document store")->required();
  train->add_option("--kind", tr.kind, "logistic or hinge");
  train->add_option("--features", tr.features, "word (uni+bi-grams) or ngram");
  train->add_option("--C", tr.C, "Inverse regularization strength")->check(CLI::PositiveNumber);
  train->add_option("--train-fraction", tr.train_fraction,
                    "Leading share used for training; the rest is held out");
  train->add_option("--out", tr.out, "Model file")->required();

  AttackArgs at;
  auto* attack = app.add_subcommand("attack", "Attack documents against a substitute model");
  attack->add_option("--model", at.model, "Substitute model file")->required();
  attack->add_option("--docs", at.docs, "Document store or tweet file")->required();
  attack->add_option("--out", at.out, "Attack results (JSON lines)")->required();
  attack->add_option("--generator", at.generator, "leet, flip, space, ws, mb, db");
  attack->add_option("--mode", at.mode, "top1, loop_nocheck, loop_check");
  attack->add_option("--k-targets,--k_targets", at.k_targets);
  attack->add_option("--top-k,--top_k", at.top_k);
  attack->add_option("--n-synonyms,--n_synonyms", at.n_synonyms);
  attack->add_option("--delta", at.delta);
  attack->add_option("--dropout-p,--dropout_p", at.dropout_p);
  attack->add_option("--rerank", at.rerank, "none or mlm_sim");
  attack->add_option("--seed", at.seed);
  attack->add_option("--embeddings", at.embeddings, "Word vector file");
  attack->add_option("--lm", at.lm, "Model server: host:port, unix:/path, exec:cmd, toy:vocab");
  attack->add_option("--sample", at.sample, "Attack only the last N documents");
  attack->add_option("--workers", at.workers, "Threads (default: all cores)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score attacked documents");
  eval->add_option("--target", ev.target, "Target model file")->required();
  eval->add_option("--substitute", ev.substitute, "Substitute model file");
  eval->add_option("--docs", ev.docs, "Attack results or a document store")->required();
  eval->add_option("--out", ev.out, "Report TSV")->required();
  eval->add_option("--lm", ev.lm, "Model server for encoding F1 (default: toy encoder)");
  eval->add_option("--condition", ev.condition, "Row label (default: attacked or unattacked)");
  eval->add_option("--substitute-corpus", ev.substitute_corpus);
  eval->add_option("--target-name", ev.target_name);
  eval->add_flag("--append", ev.append, "Add a row to an existing report");
  eval->add_flag("--no-encoding", ev.no_encoding, "Skip encoding F1");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate synthetic corpora");
  synth->add_option("--out-dir", sy.out_dir)->required();
  synth->add_option("--config-file", sy.config_file, "JSON synth config");
  synth->add_option("--seed", sy.config.seed);
  synth->add_option("--authors-per-class", sy.config.authors_per_class);
  synth->add_option("--tweets-per-author", sy.config.tweets_per_author);
  synth->add_option("--vocabulary-size", sy.config.vocabulary_size);
  synth->add_option("--markers-per-class", sy.config.markers_per_class);
  synth->add_option("--marker-rate", sy.config.marker_rate);
  synth->add_option("--marker-noise", sy.config.marker_noise);
  synth->add_option("--domain-shift", sy.config.domain_shift);

  ToyArgs ty;
  auto* toy = app.add_subcommand("toy-lm", "Serve the deterministic toy language model");
  toy->add_option("--vocab", ty.vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  toy->add_option("--host", ty.host);
  toy->add_option("--port", ty.port)->check(CLI::Range(0, 65535));
  toy->add_option("--dim", ty.dim)->check(CLI::PositiveNumber);
  toy->add_flag("--stdio", ty.stdio, "Speak the protocol on stdin/stdout");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Interactive editing service over HTTP");
  serve->add_option("--model", sv.models, "name=path (repeatable)")->required();
  serve->add_option("--embeddings", sv.embeddings);
  serve->add_option("--lm", sv.lm);
  serve->add_option("--host", sv.host);
  serve->add_option("--port", sv.port)->check(CLI::Range(0, 65535));
  serve->add_option("--ttl", sv.ttl, "Session idle timeout in seconds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*prepare) return RunPrepare(prep);
    if (*train) return RunTrain(tr);
    if (*attack) return RunAttackCmd(at);
    if (*eval) return RunEval(ev);
    if (*synth) return RunSynth(sy);
    if (*toy) return RunToyLm(ty);
    if (*serve) return RunServe(sv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ProviderError& e) {
    std::cerr << "model server error: " << e.what() << "\n";
    return kProvider;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace
}  // namespace stylomask

int main(int argc, char** argv) { return stylomask::Main(argc, argv); }
