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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylomask/attack.h"
#include "stylomask/batch.h"
#include "stylomask/classifier.h"
#include "stylomask/corpus.h"
#include "stylomask/embeddings.h"
#include "stylomask/errors.h"
#include "stylomask/eval.h"
#include "stylomask/heuristics.h"
#include "stylomask/lm_client.h"
#include "stylomask/lm_protocol.h"
#include "stylomask/lm_server.h"
#include "stylomask/rng.h"
#include "stylomask/synth.h"
#include "stylomask/toy_lm.h"

namespace py = pybind11;
using nlohmann::json;

namespace stylomask {
namespace {

Document DocFromTokens(const std::vector<std::string>& tokens,
                       std::optional<std::string> label = std::nullopt) {
  Document d;
  d.author_id = "python";
  for (const auto& t : tokens) d.tokens.push_back(ClassifySurface(t));
  d.label = std::move(label);
  if (!tokens.empty()) d.tweet_boundaries = {0};
  d.tweet_count = 1;
  return d;
}

FeatureConfig ParseFeatures(const std::string& name) {
  if (name == "word") return FeatureConfig::WordUniBigram();
  if (name == "ngram") return FeatureConfig::NGram();
  throw ConfigError("features must be word or ngram");
}

// Owns the toy model so the server's reference stays valid.
class ToyServer {
 public:
  ToyServer(std::vector<std::string> vocab, size_t dim)
      : lm_(std::move(vocab), dim), server_(lm_, "stylomask-toy", dim) {}
  uint16_t Start(const std::string& host, uint16_t port) {
    port_ = server_.Start(host, port);
    return port_;
  }
  void Stop() { server_.Stop(); }
  uint16_t port() const { return port_; }

 private:
  ToyLm lm_;
  LmServer server_;
  uint16_t port_ = 0;
};

}  // namespace
}  // namespace stylomask

PYBIND11_MODULE(_stylomask, m) {
  using namespace stylomask;
  m.doc() = "Core of the stylomask obfuscation toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  // Later registrations are tried first, so subclasses go last.
  auto provider_error =
      py::register_exception<ProviderError>(m, "ProviderError", PyExc_RuntimeError);
  py::register_exception<ProtocolError>(m, "ProtocolError", provider_error.ptr());
  py::register_exception<TimeoutError>(m, "TimeoutError", provider_error.ptr());

  m.attr("PROTOCOL_VERSION") = kProtocolVersion;
  m.attr("MASK_TOKEN") = std::string(kMaskToken);

  m.def("preprocess", [](const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : Preprocess(text)) {
      out.emplace_back(t.surface, std::string(TokenKindName(t.kind)));
    }
    return out;
  }, py::arg("text"), "Tokens of a tweet as (surface, kind) pairs.");

  m.def("leet", [](const std::string& w) { return Leet(w); }, py::arg("word"));
  m.def("flip", [](const std::string& w) { return Flip(w); }, py::arg("word"));
  m.def("random_space", [](const std::string& w, uint64_t seed) {
    SplitMix64 rng(seed);
    return RandomSpace(w, rng);
  }, py::arg("word"), py::arg("seed"));

  m.def("meteor", [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp,
                     double alpha, double beta, double gamma) {
    return Meteor(ref, hyp, MeteorParams{alpha, beta, gamma});
  }, py::arg("reference"), py::arg("hypothesis"), py::arg("alpha") = 0.9,
        py::arg("beta") = 3.0, py::arg("gamma") = 0.5);

  py::class_<EmbeddingStore, std::shared_ptr<EmbeddingStore>>(m, "EmbeddingStore")
      .def_static("load", [](const std::string& path) {
        return std::make_shared<EmbeddingStore>(EmbeddingStore::LoadFile(path));
      }, py::arg("path"))
      .def_static("from_vectors", [](std::vector<std::string> words,
                                     std::vector<std::vector<double>> vectors) {
        return std::make_shared<EmbeddingStore>(
            EmbeddingStore::FromVectors(std::move(words), std::move(vectors)));
      }, py::arg("words"), py::arg("vectors"))
      .def("nearest", &EmbeddingStore::Nearest, py::arg("word"), py::arg("n") = 50,
           py::arg("min_similarity") = 0.7)
      .def("__len__", &EmbeddingStore::size)
      .def_property_readonly("dimension", &EmbeddingStore::dimension)
      .def_property_readonly("words", &EmbeddingStore::words);

  py::class_<TextClassifier, std::shared_ptr<TextClassifier>>(m, "Classifier")
      .def_static("load", [](const std::string& path) {
        return std::make_shared<TextClassifier>(TextClassifier::LoadFile(path));
      }, py::arg("path"))
      .def_static("train", [](const std::vector<std::pair<std::vector<std::string>,
                                                          std::string>>& docs,
                              const std::string& kind, const std::string& features,
                              double C) {
        std::vector<Document> ds;
        for (const auto& [toks, label] : docs) ds.push_back(DocFromTokens(toks, label));
        TrainSpec spec{ParseLossKind(kind), ParseFeatures(features), C};
        py::gil_scoped_release release;
        return std::make_shared<TextClassifier>(TrainTextClassifier(ds, spec));
      }, py::arg("docs"), py::arg("kind") = "logistic", py::arg("features") = "word",
         py::arg("C") = 1.0)
      .def("save", &TextClassifier::SaveFile, py::arg("path"))
      .def("logit", [](const TextClassifier& c, const std::vector<std::string>& toks,
                       const std::string& label) { return c.Logit(toks, label); },
           py::arg("tokens"), py::arg("label"))
      .def("predict", [](const TextClassifier& c, const std::vector<std::string>& toks) {
        return c.Predict(toks);
      }, py::arg("tokens"))
      .def_property_readonly("labels", [](const TextClassifier& c) {
        return c.model().label_set();
      });

  m.def("omission_scores", [](const TextClassifier& model, const std::vector<std::string>& toks,
                              const std::string& label) {
    const auto r = OmissionScores(model, DocFromTokens(toks), label);
    py::dict d;
    d["scores"] = r.scores;
    d["attackable"] = r.attackable;
    d["already_misclassified"] = r.already_misclassified;
    d["queries"] = r.queries;
    return d;
  }, py::arg("model"), py::arg("tokens"), py::arg("label"));

  m.def("_run_attack", [](const TextClassifier& model, const std::vector<std::string>& toks,
                          const std::string& label, const std::string& config_json,
                          std::shared_ptr<EmbeddingStore> embeddings,
                          const std::string& lm_endpoint) {
    const AttackConfig config = AttackConfigFromJson(json::parse(config_json));
    const Document doc = DocFromTokens(toks, label);
    std::unique_ptr<LmProvider> lm;
    py::gil_scoped_release release;
    if (!lm_endpoint.empty()) lm = LmClient::Connect(lm_endpoint);
    AttackProviders providers;
    providers.embeddings = embeddings.get();
    providers.lm = lm.get();
    const auto r = RunAttack(model, doc, label, config, providers);
    return AttackRecordToJson(0, doc, r).dump();
  }, py::arg("model"), py::arg("tokens"), py::arg("label"), py::arg("config_json"),
     py::arg("embeddings") = nullptr, py::arg("lm_endpoint") = "");

  m.def("_generate_synthetic", [](const std::string& config_json) {
    const SynthConfig cfg = SynthConfig::FromJson(json::parse(config_json));
    SynthOutput out;
    {
      py::gil_scoped_release release;
      out = GenerateSynthetic(cfg);
    }
    auto tweets = [](const std::vector<RawTweet>& ts) {
      json a = json::array();
      for (const auto& t : ts) a.push_back({{"author_id", t.author_id}, {"text", t.text},
                                            {"label", t.label}});
      return a;
    };
    return json{{"config", cfg.ToJson()},
                {"substitute", tweets(out.substitute)},
                {"target", tweets(out.target)},
                {"vocabulary", out.vocabulary},
                {"markers", out.markers},
                {"decoys", out.decoys}}
        .dump();
  }, py::arg("config_json"));

  m.def("_encode_frame", [](const std::string& body) {
    return py::bytes(EncodeFrame(DecodeBody(body)));
  }, py::arg("body_json"), "Validates a message body and adds the length prefix.");

  py::class_<FrameDecoder>(m, "_FrameDecoder")
      .def(py::init<>())
      .def("feed", [](FrameDecoder& d, py::bytes b) { d.Feed(std::string(b)); })
      .def("next", [](FrameDecoder& d) -> std::optional<std::string> {
        auto msg = d.Next();
        if (!msg) return std::nullopt;
        return EncodeBody(*msg);
      })
      .def_property_readonly("buffered", &FrameDecoder::buffered);

  py::class_<ToyServer>(m, "ToyServer")
      .def(py::init<std::vector<std::string>, size_t>(), py::arg("vocabulary"),
           py::arg("dim") = ToyLm::kDefaultDim)
      .def("start", &ToyServer::Start, py::arg("host") = "127.0.0.1", py::arg("port") = 0,
           py::call_guard<py::gil_scoped_release>())
      .def("stop", &ToyServer::Stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &ToyServer::port);
}
