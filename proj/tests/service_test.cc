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

#include <gtest/gtest.h>

#include <atomic>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "stylomask/errors.h"
#include "stylomask/eval.h"
#include "stylomask/features.h"
#include "stylomask/http_service.h"
#include "stylomask/rng.h"
#include "stylomask/toy_lm.h"

namespace stylomask {
namespace {

using nlohmann::json;

std::shared_ptr<const TextClassifier> Model() {
  auto space = FeatureSpace::FromParts(FeatureConfig::WordUniBigram(),
                                       {"w:bad", "w:fine", "w:good", "w:ok"},
                                       {1.0, 1.0, 1.0, 1.0});
  return std::make_shared<TextClassifier>(
      std::move(space),
      LinearClassifier({-1.0, -2.0, 3.0, 0.5}, 0.1, LossKind::kLogistic, {"neg", "pos"}));
}

std::shared_ptr<const EmbeddingStore> Store() {
  return std::make_shared<EmbeddingStore>(EmbeddingStore::FromVectors(
      {"good", "fine", "ok", "bad"}, {{1, 0, 0}, {0.9, 0.1, 0}, {0, 1, 0}, {0, 0, 1}}));
}

struct Clock {
  std::chrono::steady_clock::time_point t{};
};

class ManagerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceOptions opts;
    opts.ttl = std::chrono::seconds(60);
    opts.now = [this] { return clock_.t; };
    mgr_ = std::make_unique<SessionManager>(opts);
    mgr_->AddModel("lr", Model());
    mgr_->SetEmbeddings(Store());
    mgr_->SetProviderFactory([] {
      return std::make_unique<ToyLm>(std::vector<std::string>{"good", "fine", "ok", "bad"});
    });
  }
  std::string NewSession(const std::string& text = "Good day, ok @bob good") {
    return mgr_->CreateSession({{"text", text}, {"label", "pos"}})["session"];
  }

  Clock clock_;
  std::unique_ptr<SessionManager> mgr_;
};

TEST_F(ManagerTest, CreateReportsPredictionThroughTheLogisticLink) {
  const auto s = mgr_->CreateSession({{"text", "good ok"}, {"label", "pos"}, {"model", "lr"}});
  const auto model = Model();
  const std::vector<std::string> toks = {"good", "ok"};
  const double logit = model->Logit(toks, "pos");
  EXPECT_EQ(s["logit"].get<double>(), logit);
  EXPECT_EQ(s["probability"].get<double>(), Sigmoid(logit));
  EXPECT_EQ(s["prediction"], "pos");
  EXPECT_FALSE(s["flipped"].get<bool>());
  EXPECT_EQ(s["schema"], kServiceSchemaVersion);
  EXPECT_NE(NewSession(), NewSession());
}

TEST_F(ManagerTest, CreateRejectsBadInput) {
  auto status = [&](const json& body) {
    try {
      mgr_->CreateSession(body);
    } catch (const ServiceError& e) {
      return e.status();
    }
    return 0;
  };
  EXPECT_EQ(status({{"text", ""}, {"label", "pos"}}), 400);
  EXPECT_EQ(status({{"text", "http://x.y"}, {"label", "pos"}}), 400);
  EXPECT_EQ(status({{"text", "good"}, {"label", "maybe"}}), 400);
  EXPECT_EQ(status({{"text", "good"}, {"label", "pos"}, {"model", "nope"}}), 404);
  EXPECT_EQ(status(json::array()), 400);
}

TEST_F(ManagerTest, ImportanceMatchesLibraryAndRefreshesAfterEdits) {
  const auto id = NewSession();
  const auto imp = mgr_->Importance(id);
  const Document doc = [] {
    Document d;
    d.tokens = Preprocess("Good day, ok @bob good");
    return d;
  }();
  const auto direct = OmissionScores(*Model(), doc, "pos");
  EXPECT_EQ(imp["scores"].get<std::vector<double>>(), direct.scores);
  EXPECT_EQ(imp["attackable"].get<std::vector<bool>>(), direct.attackable);
  mgr_->ApplyEdit(id, 0, "fine");
  Document edited = doc;
  edited.tokens[0] = ClassifySurface("fine");
  EXPECT_EQ(mgr_->Importance(id)["scores"].get<std::vector<double>>(),
            OmissionScores(*Model(), edited, "pos").scores);
  EXPECT_EQ(mgr_->Importance(id)["edit_count"], 1);
}

TEST_F(ManagerTest, CandidateDeltasAreRecomputable) {
  const auto id = NewSession("good ok");
  const auto c = mgr_->Candidates(id, 0, "ws", 5);
  const auto model = Model();
  const std::vector<std::string> base = {"good", "ok"};
  const double before = model->Logit(base, "pos");
  ASSERT_GE(c["candidates"].size(), 2u);
  const auto& identity = c["candidates"][0];
  EXPECT_TRUE(identity["identity"].get<bool>());
  EXPECT_EQ(identity["delta_logit"].get<double>(), 0.0);
  EXPECT_EQ(identity["delta_probability"].get<double>(), 0.0);
  for (const auto& cand : c["candidates"]) {
    auto v = base;
    v[0] = cand["surface"];
    const double after = model->Logit(v, "pos");
    EXPECT_EQ(cand["delta_logit"].get<double>(), after - before);
    EXPECT_EQ(cand["delta_probability"].get<double>(), Sigmoid(after) - Sigmoid(before));
    EXPECT_EQ(cand["flips"].get<bool>(), model->Predict(v) != "pos");
  }
  EXPECT_EQ(c["candidates"][1]["surface"], "fine");
  EXPECT_TRUE(c["candidates"][1]["flips"].get<bool>());
  EXPECT_FALSE(mgr_->Candidates(id, 0, "mb", 3)["candidates"].empty());
}

TEST_F(ManagerTest, ProviderDownIs503) {
  mgr_->SetProviderFactory([]() -> std::unique_ptr<LmProvider> {
    throw ProviderError("connection refused");
  });
  const auto id = NewSession();
  try {
    mgr_->Candidates(id, 0, "mb", 3);
    FAIL() << "expected an error";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 503);
  }
}

TEST_F(ManagerTest, ApplyRevertRestoresExactly) {
  const auto id = NewSession();
  const auto start = mgr_->Export(id);
  mgr_->ApplyEdit(id, 0, "fine");
  const auto second = mgr_->ApplyEdit(id, 0, "bad");
  EXPECT_EQ(second["tokens"][0], "bad");
  EXPECT_EQ(second["edit_count"], 2);
  EXPECT_EQ(second["flipped"].get<bool>(), second["prediction"] != "pos");
  mgr_->Revert(id);
  const auto back = mgr_->Revert(id);
  EXPECT_EQ(back["logit"].get<double>(), start["logit"].get<double>());
  EXPECT_EQ(back["tokens"], start["tokens"]);
  EXPECT_EQ(mgr_->Revert(id)["edit_count"], 0);
  try {
    mgr_->ApplyEdit(id, 99, "x");
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 400);
  }
}

TEST_F(ManagerTest, RandomInterleavingsReplayExactly) {
  const auto id = NewSession("good ok good bad ok ok good");
  SplitMix64 rng(8);
  const std::vector<std::string> words = {"good", "fine", "ok", "bad", "zz"};
  std::vector<Edit> stack;
  const auto original = Preprocess("good ok good bad ok ok good");
  for (int step = 0; step < 200; ++step) {
    json state;
    switch (rng.Below(4)) {
      case 0:
      case 1: {
        const size_t pos = rng.Below(original.size());
        const auto& w = words[rng.Below(words.size())];
        stack.push_back({pos, original[pos].surface, w});
        state = mgr_->ApplyEdit(id, pos, w);
        break;
      }
      case 2:
        if (!stack.empty()) stack.pop_back();
        state = mgr_->Revert(id);
        break;
      default:
        mgr_->Importance(id);
        state = mgr_->Export(id);
    }
    Document d;
    d.tokens = original;
    const auto expect = ApplyEdits(d, CollapseEdits(stack)).Surfaces();
    ASSERT_EQ(state["tokens"].get<std::vector<std::string>>(), expect);
    ASSERT_EQ(state["logit"].get<double>(), Model()->Logit(expect, "pos"));
  }
}

TEST_F(ManagerTest, AutoAttackMatchesLibraryAndCancels) {
  const std::string text = "good ok good day";
  const auto id = NewSession(text);
  std::vector<json> lines;
  mgr_->AutoAttack(id, json::object(), [&](const json& j) {
    lines.push_back(j);
    return true;
  });
  Document d;
  d.tokens = Preprocess(text);
  AttackProviders p;
  const auto store = Store();
  p.embeddings = store.get();
  const auto direct = RunAttack(*Model(), d, "pos", AttackConfig{}, p);
  ASSERT_EQ(lines.size(), direct.edits.size() + 1);
  for (size_t i = 0; i < direct.edits.size(); ++i) {
    EXPECT_EQ(lines[i]["position"], direct.edits[i].position);
    EXPECT_EQ(lines[i]["replacement"], direct.edits[i].replacement);
    mgr_->ApplyEdit(id, lines[i]["position"], lines[i]["replacement"]);
  }
  EXPECT_TRUE(lines.back()["done"].get<bool>());
  EXPECT_EQ(mgr_->Export(id)["tokens"].get<std::vector<std::string>>(),
            direct.adversarial.Surfaces());

  const auto id2 = NewSession(text);
  size_t seen = 0;
  mgr_->AutoAttack(id2, json::object(), [&](const json&) { return ++seen < 1; });
  EXPECT_EQ(seen, 1u);
  EXPECT_EQ(mgr_->Export(id2)["edit_count"], 0);

  // Nothing to substitute: only the summary line.
  const auto id3 = NewSession("zzz yyy");
  lines.clear();
  mgr_->AutoAttack(id3, json::object(), [&](const json& j) {
    lines.push_back(j);
    return true;
  });
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["suggestions"], 0);
}

TEST_F(ManagerTest, ExportCarriesMetrics) {
  const auto id = NewSession("Good day, ok @bob good");
  auto e = mgr_->Export(id);
  EXPECT_EQ(e["text"], e["original_text"]);
  EXPECT_EQ(e["change_rate"].get<double>(), 0.0);
  mgr_->ApplyEdit(id, 0, "fine");
  mgr_->ApplyEdit(id, 0, "good");  // back to the original surface
  mgr_->ApplyEdit(id, 3, "fine");
  e = mgr_->Export(id);
  const auto orig = Preprocess("Good day, ok @bob good");
  std::vector<std::string> o, w;
  for (const auto& t : orig) o.push_back(t.surface);
  w = o;
  w[3] = "fine";
  EXPECT_EQ(e["meteor"].get<double>(), Meteor(o, w));
  EXPECT_DOUBLE_EQ(e["change_rate"].get<double>(), 1.0 / static_cast<double>(o.size()));
  EXPECT_EQ(e["edit_log"].size(), 3u);
}

TEST_F(ManagerTest, SessionsExpire) {
  const auto id = NewSession();
  clock_.t += std::chrono::seconds(30);
  mgr_->Importance(id);  // touches the session
  clock_.t += std::chrono::seconds(59);
  EXPECT_EQ(mgr_->EvictExpired(), 0u);
  clock_.t += std::chrono::seconds(2);
  EXPECT_EQ(mgr_->EvictExpired(), 1u);
  try {
    mgr_->Export(id);
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 404);
  }
}

TEST(FifoMutex, ServesInArrivalOrder) {
  FifoMutex mu;
  std::vector<int> order;
  mu.lock();
  std::vector<std::thread> threads;
  std::atomic<int> started{0};
  for (int i = 0; i < 5; ++i) {
    threads.emplace_back([&, i] {
      ++started;
      std::lock_guard lock(mu);
      order.push_back(i);
    });
    // Give each thread time to take its ticket before the next starts.
    while (started.load() <= i) std::this_thread::yield();
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  mu.unlock();
  for (auto& t : threads) t.join();
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(CollapseEdits, LatestWinsInFirstEditOrder) {
  const std::vector<Edit> stack = {{2, "a", "x"}, {0, "b", "y"}, {2, "a", "z"}};
  EXPECT_EQ(CollapseEdits(stack), (std::vector<Edit>{{2, "a", "z"}, {0, "b", "y"}}));
}

class HttpTest : public ManagerTest {
 protected:
  void SetUp() override {
    ManagerTest::SetUp();
    RegisterRoutes(server_, *mgr_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client Client() { return httplib::Client("127.0.0.1", port_); }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(HttpTest, FullWorkflow) {
  auto cli = Client();
  auto models = cli.Get("/models");
  ASSERT_TRUE(models);
  EXPECT_EQ(json::parse(models->body)["models"], json::array({"lr"}));

  auto created = cli.Post("/session", json{{"text", "good ok"}, {"label", "pos"}}.dump(),
                          "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  const auto state = json::parse(created->body);
  const std::string id = state["session"];
  EXPECT_EQ(state["logit"].get<double>(),
            Model()->Logit(std::vector<std::string>{"good", "ok"}, "pos"));

  auto imp = cli.Get("/session/" + id + "/importance");
  ASSERT_EQ(imp->status, 200);
  auto cands = cli.Get("/session/" + id + "/candidates?position=0&generator=ws&top_k=3");
  ASSERT_EQ(cands->status, 200);
  EXPECT_EQ(json::parse(cands->body)["candidates"][1]["surface"], "fine");
  auto edit = cli.Post("/session/" + id + "/edit", json{{"position", 0}, {"surface", "fine"}}.dump(),
                       "application/json");
  ASSERT_EQ(edit->status, 200);
  EXPECT_TRUE(json::parse(edit->body)["flipped"].get<bool>());
  auto revert = cli.Post("/session/" + id + "/revert", "", "application/json");
  EXPECT_EQ(json::parse(revert->body)["logit"], state["logit"]);

  auto stream = cli.Post("/session/" + id + "/auto", "{}", "application/json");
  ASSERT_EQ(stream->status, 200);
  EXPECT_EQ(stream->get_header_value("Content-Type"), "application/x-ndjson");
  std::vector<json> lines;
  std::istringstream in(stream->body);
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
  ASSERT_FALSE(lines.empty());
  EXPECT_TRUE(lines.back()["done"].get<bool>());

  auto exported = cli.Get("/session/" + id + "/export");
  EXPECT_EQ(json::parse(exported->body)["text"], "good ok");
}

TEST_F(HttpTest, ErrorStatuses) {
  auto cli = Client();
  EXPECT_EQ(cli.Get("/session/abcdef/export")->status, 404);
  EXPECT_EQ(cli.Post("/session", "{not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Post("/session", json{{"text", ""}, {"label", "pos"}}.dump(),
                     "application/json")->status, 400);
  const std::string id = json::parse(cli.Post("/session",
                                              json{{"text", "good"}, {"label", "pos"}}.dump(),
                                              "application/json")->body)["session"];
  EXPECT_EQ(cli.Get("/session/" + id + "/candidates")->status, 400);
  EXPECT_EQ(cli.Get("/session/" + id + "/candidates?position=-1")->status, 400);
  EXPECT_EQ(cli.Get("/session/" + id + "/candidates?position=0&generator=zz")->status, 400);
  EXPECT_EQ(cli.Post("/session/" + id + "/edit", "{}", "application/json")->status, 400);
  EXPECT_EQ(cli.Post("/session/" + id + "/auto", json{{"mode", "x"}}.dump(),
                     "application/json")->status, 400);
  const auto err = json::parse(cli.Get("/session/" + id + "/candidates")->body);
  EXPECT_TRUE(err.contains("error"));
}

}  // namespace
}  // namespace stylomask
