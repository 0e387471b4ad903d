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

#include "stylomask/lm_protocol.h"

#include <cmath>

#include "json.hpp"
#include "stylomask/errors.h"

namespace stylomask {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const json& Field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + name + "'");
  return *it;
}

uint64_t Unsigned(const json& j, const char* name) {
  const json& v = Field(j, name);
  if (!v.is_number_unsigned()) {
    // nlohmann stores non-negative literals as unsigned; anything else is bad.
    throw ProtocolError(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<uint64_t>();
}

double Real(const json& j, const char* name) {
  const json& v = Field(j, name);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::string String(const json& j, const char* name) {
  const json& v = Field(j, name);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> Strings(const json& j, const char* name) {
  const json& v = Field(j, name);
  if (!v.is_array()) throw ProtocolError(std::string("field '") + name + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string()) throw ProtocolError(std::string("'") + name + "' holds a non-string");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> Reals(const json& v, const char* name) {
  if (!v.is_array()) throw ProtocolError(std::string("field '") + name + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ProtocolError(std::string("'") + name + "' holds a non-number");
    out.push_back(e.get<double>());
  }
  return out;
}

json ToJson(const Message& m) {
  return std::visit(
      Overloaded{
          [](const Hello& h) {
            return json{{"type", "hello"},
                        {"version", h.version},
                        {"agent", h.agent},
                        {"dim", h.dim}};
          },
          [](const FillRequest& r) {
            return json{{"type", "fill"},
                        {"request_id", r.request_id},
                        {"kind", r.kind == FillKind::kMask ? "mask" : "dropout"},
                        {"tokens", r.tokens},
                        {"target_index", r.target_index},
                        {"top_k", r.top_k},
                        {"dropout_p", r.dropout_p},
                        {"seed", r.seed}};
          },
          [](const FillResponse& r) {
            json cands = json::array();
            for (const auto& c : r.candidates) {
              cands.push_back({{"surface", c.surface}, {"score", c.score}});
            }
            return json{{"type", "fill_result"},
                        {"request_id", r.request_id},
                        {"candidates", std::move(cands)}};
          },
          [](const EncodeRequest& r) {
            return json{{"type", "encode"},
                        {"request_id", r.request_id},
                        {"tokens", r.tokens},
                        {"target_index", r.target_index}};
          },
          [](const EncodeResponse& r) {
            return json{{"type", "encode_result"},
                        {"request_id", r.request_id},
                        {"vectors", r.vectors},
                        {"attention", r.attention}};
          },
          [](const ErrorMessage& e) {
            return json{{"type", "error"},
                        {"request_id", e.request_id ? json(*e.request_id) : json(nullptr)},
                        {"code", e.code},
                        {"message", e.message}};
          },
      },
      m);
}

Message FromJson(const json& j) {
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const std::string type = String(j, "type");
  if (type == "hello") {
    Hello h;
    h.version = static_cast<int>(Unsigned(j, "version"));
    h.agent = String(j, "agent");
    h.dim = j.contains("dim") ? Unsigned(j, "dim") : 0;
    return h;
  }
  if (type == "fill") {
    FillRequest r;
    r.request_id = Unsigned(j, "request_id");
    const std::string kind = String(j, "kind");
    if (kind == "mask") {
      r.kind = FillKind::kMask;
    } else if (kind == "dropout") {
      r.kind = FillKind::kDropout;
    } else {
      throw ProtocolError("unknown fill kind '" + kind + "'");
    }
    r.tokens = Strings(j, "tokens");
    r.target_index = Unsigned(j, "target_index");
    r.top_k = Unsigned(j, "top_k");
    r.dropout_p = Real(j, "dropout_p");
    r.seed = Unsigned(j, "seed");
    return r;
  }
  if (type == "fill_result") {
    FillResponse r;
    r.request_id = Unsigned(j, "request_id");
    const json& cands = Field(j, "candidates");
    if (!cands.is_array()) throw ProtocolError("'candidates' must be an array");
    for (const auto& c : cands) {
      if (!c.is_object()) throw ProtocolError("candidate must be an object");
      r.candidates.push_back({String(c, "surface"), Real(c, "score")});
    }
    return r;
  }
  if (type == "encode") {
    EncodeRequest r;
    r.request_id = Unsigned(j, "request_id");
    r.tokens = Strings(j, "tokens");
    r.target_index = Unsigned(j, "target_index");
    return r;
  }
  if (type == "encode_result") {
    EncodeResponse r;
    r.request_id = Unsigned(j, "request_id");
    const json& vecs = Field(j, "vectors");
    if (!vecs.is_array()) throw ProtocolError("'vectors' must be an array");
    for (const auto& v : vecs) r.vectors.push_back(Reals(v, "vectors"));
    r.attention = Reals(Field(j, "attention"), "attention");
    return r;
  }
  if (type == "error") {
    ErrorMessage e;
    const json& id = Field(j, "request_id");
    if (!id.is_null()) e.request_id = Unsigned(j, "request_id");
    e.code = String(j, "code");
    e.message = String(j, "message");
    return e;
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

}  // namespace

std::string_view MessageType(const Message& m) {
  static constexpr std::string_view kNames[] = {
      "hello", "fill", "fill_result", "encode", "encode_result", "error"};
  return kNames[m.index()];
}

std::string EncodeBody(const Message& m) { return ToJson(m).dump(); }

Message DecodeBody(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed JSON body: ") + e.what());
  }
  try {
    return FromJson(j);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad message: ") + e.what());
  }
}

std::string EncodeFrame(const Message& m) {
  std::string body;
  try {
    body = EncodeBody(m);
  } catch (const json::exception& e) {
    // Invalid UTF-8 in a token, for instance.
    throw ProtocolError(std::string("cannot encode message: ") + e.what());
  }
  if (body.size() > kMaxFrameBytes) throw ProtocolError("message exceeds frame limit");
  const auto n = static_cast<uint32_t>(body.size());
  std::string frame;
  frame.reserve(4 + body.size());
  frame.push_back(static_cast<char>((n >> 24) & 0xFF));
  frame.push_back(static_cast<char>((n >> 16) & 0xFF));
  frame.push_back(static_cast<char>((n >> 8) & 0xFF));
  frame.push_back(static_cast<char>(n & 0xFF));
  frame += body;
  return frame;
}

void ValidateRequest(const FillRequest& r) {
  if (r.tokens.empty()) throw ProtocolError("fill request has no tokens");
  if (r.target_index >= r.tokens.size()) throw ProtocolError("target_index out of range");
  if (!(r.dropout_p >= 0.0 && r.dropout_p < 1.0)) {
    throw ProtocolError("dropout_p must lie in [0, 1)");
  }
}

void ValidateRequest(const EncodeRequest& r) {
  if (r.tokens.empty()) throw ProtocolError("encode request has no tokens");
  if (r.target_index >= r.tokens.size()) throw ProtocolError("target_index out of range");
}

void ValidateResponse(const FillRequest& request, const FillResponse& response) {
  if (response.request_id != request.request_id) throw ProtocolError("request_id mismatch");
  if (response.candidates.size() > request.top_k) {
    throw ProtocolError("more candidates than top_k");
  }
  for (size_t i = 0; i < response.candidates.size(); ++i) {
    const auto& c = response.candidates[i];
    if (!std::isfinite(c.score)) throw ProtocolError("non-finite candidate score");
    if (i > 0 && c.score > response.candidates[i - 1].score) {
      throw ProtocolError("candidates not in descending score order");
    }
  }
}

void ValidateResponse(const EncodeRequest& request, const EncodeResponse& response) {
  if (response.request_id != request.request_id) throw ProtocolError("request_id mismatch");
  const size_t n = request.tokens.size();
  if (response.vectors.size() != n || response.attention.size() != n) {
    throw ProtocolError("encoding length does not match the token count");
  }
  const size_t dim = response.vectors.front().size();
  if (dim == 0) throw ProtocolError("zero-dimensional encoding");
  for (const auto& v : response.vectors) {
    if (v.size() != dim) throw ProtocolError("ragged encoding vectors");
    for (double x : v) {
      if (!std::isfinite(x)) throw ProtocolError("non-finite encoding value");
    }
  }
  double total = 0.0;
  for (double w : response.attention) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ProtocolError("negative attention weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ProtocolError("attention does not sum to one");
}

void FrameDecoder::Feed(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<Message> FrameDecoder::Next() {
  if (buffered() < 4) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const uint32_t n = (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) |
                     (uint32_t{p[2]} << 8) | uint32_t{p[3]};
  if (n > kMaxFrameBytes) throw ProtocolError("frame length exceeds limit");
  if (buffered() < 4 + size_t{n}) return std::nullopt;
  std::string_view body(buffer_.data() + offset_ + 4, n);
  Message m = DecodeBody(body);
  offset_ += 4 + size_t{n};
  if (offset_ > (1u << 16) && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return m;
}

}  // namespace stylomask
