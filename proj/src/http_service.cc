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

#include "stylomask/http_service.h"

#include <memory>
#include <string>

#include "httplib.h"
#include "stylomask/errors.h"

namespace stylomask {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

// Runs `fn` and maps exceptions onto status codes.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    Reply(res, e.status(), {{"error", e.what()}});
  } catch (const ProviderError& e) {
    Reply(res, 503, {{"error", e.what()}});
  } catch (const ConfigError& e) {
    Reply(res, 400, {{"error", e.what()}});
  } catch (const DataError& e) {
    Reply(res, 400, {{"error", e.what()}});
  } catch (const json::exception& e) {
    Reply(res, 400, {{"error", std::string("bad JSON: ") + e.what()}});
  } catch (const std::exception& e) {
    Reply(res, 500, {{"error", e.what()}});
  }
}

json Body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

size_t SizeParam(const httplib::Request& req, const std::string& key, size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  try {
    size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<size_t>(n);
  } catch (const std::exception&) {
    throw ServiceError(400, key + " must be a non-negative integer");
  }
}

}  // namespace

void RegisterRoutes(httplib::Server& server, SessionManager& manager) {
  server.Get("/models", [&](const httplib::Request&, httplib::Response& res) {
    Guard(res, [&] { Reply(res, 200, {{"models", manager.ModelIds()}}); });
  });
  server.Post("/session", [&](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] { Reply(res, 201, manager.CreateSession(Body(req))); });
  });
  server.Get(R"(/session/([0-9a-f]+)/importance)",
             [&](const httplib::Request& req, httplib::Response& res) {
               Guard(res, [&] { Reply(res, 200, manager.Importance(req.matches[1])); });
             });
  server.Get(R"(/session/([0-9a-f]+)/candidates)",
             [&](const httplib::Request& req, httplib::Response& res) {
               Guard(res, [&] {
                 if (!req.has_param("position")) throw ServiceError(400, "position is required");
                 const std::string gen =
                     req.has_param("generator") ? req.get_param_value("generator") : "ws";
                 Reply(res, 200,
                       manager.Candidates(req.matches[1], SizeParam(req, "position", 0), gen,
                                          SizeParam(req, "top_k", 10)));
               });
             });
  server.Post(R"(/session/([0-9a-f]+)/edit)",
              [&](const httplib::Request& req, httplib::Response& res) {
                Guard(res, [&] {
                  const json body = Body(req);
                  if (!body.contains("position") || !body.contains("surface")) {
                    throw ServiceError(400, "position and surface are required");
                  }
                  Reply(res, 200,
                        manager.ApplyEdit(req.matches[1], body["position"].get<size_t>(),
                                          body["surface"].get<std::string>()));
                });
              });
  server.Post(R"(/session/([0-9a-f]+)/revert)",
              [&](const httplib::Request& req, httplib::Response& res) {
                Guard(res, [&] { Reply(res, 200, manager.Revert(req.matches[1])); });
              });
  server.Post(R"(/session/([0-9a-f]+)/auto)",
              [&](const httplib::Request& req, httplib::Response& res) {
                Guard(res, [&] {
                  // Compute up front so errors still get a proper status.
                  auto lines = std::make_shared<std::vector<std::string>>();
                  manager.AutoAttack(req.matches[1], Body(req), [&](const json& j) {
                    lines->push_back(j.dump() + "\n");
                    return true;
                  });
                  res.status = 200;
                  res.set_chunked_content_provider(
                      "application/x-ndjson",
                      [lines, i = size_t{0}](size_t, httplib::DataSink& sink) mutable {
                        if (i < lines->size()) {
                          const auto& l = (*lines)[i++];
                          return sink.write(l.data(), l.size());
                        }
                        sink.done();
                        return true;
                      });
                });
              });
  server.Get(R"(/session/([0-9a-f]+)/export)",
             [&](const httplib::Request& req, httplib::Response& res) {
               Guard(res, [&] { Reply(res, 200, manager.Export(req.matches[1])); });
             });
}

}  // namespace stylomask
