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

// Model-server wire protocol. Every message is one frame: a 4-byte big-endian
// body length followed by a UTF-8 JSON object whose "type" field selects the
// message kind. See docs/protocol.md for the frozen field list.

#ifndef STYLOMASK_LM_PROTOCOL_H_
#define STYLOMASK_LM_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stylomask {

inline constexpr int kProtocolVersion = 1;
inline constexpr uint32_t kMaxFrameBytes = 64u << 20;
inline constexpr std::string_view kMaskToken = "[MASK]";

enum class FillKind { kMask, kDropout };

struct Hello {
  int version = kProtocolVersion;
  std::string agent;
  size_t dim = 0;  // servers advertise their encoding dimension

  bool operator==(const Hello&) const = default;
};

struct FillRequest {
  uint64_t request_id = 0;
  FillKind kind = FillKind::kMask;
  std::vector<std::string> tokens;
  size_t target_index = 0;
  size_t top_k = 10;
  double dropout_p = 0.0;
  uint64_t seed = 0;

  bool operator==(const FillRequest&) const = default;
};

struct ScoredToken {
  std::string surface;
  double score = 0.0;

  bool operator==(const ScoredToken&) const = default;
};

struct FillResponse {
  uint64_t request_id = 0;
  std::vector<ScoredToken> candidates;  // descending score

  bool operator==(const FillResponse&) const = default;
};

struct EncodeRequest {
  uint64_t request_id = 0;
  std::vector<std::string> tokens;
  size_t target_index = 0;

  bool operator==(const EncodeRequest&) const = default;
};

// h(D_i | D) for every token plus the attention profile w_{i,t} of the
// target position, normalized to sum to one.
struct EncodeResponse {
  uint64_t request_id = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<double> attention;

  bool operator==(const EncodeResponse&) const = default;
};

struct ErrorMessage {
  std::optional<uint64_t> request_id;
  std::string code;
  std::string message;

  bool operator==(const ErrorMessage&) const = default;
};

using Message = std::variant<Hello, FillRequest, FillResponse, EncodeRequest,
                             EncodeResponse, ErrorMessage>;

std::string_view MessageType(const Message& m);

// JSON body without the length prefix.
std::string EncodeBody(const Message& m);
// Throws ProtocolError on malformed JSON, unknown types or missing fields.
Message DecodeBody(std::string_view body);

std::string EncodeFrame(const Message& m);

// Semantic checks shared by servers and clients. Throw ProtocolError.
void ValidateRequest(const FillRequest& r);
void ValidateRequest(const EncodeRequest& r);
void ValidateResponse(const FillRequest& request, const FillResponse& response);
void ValidateResponse(const EncodeRequest& request, const EncodeResponse& response);

// Incremental frame parser for byte streams that arrive in arbitrary pieces.
class FrameDecoder {
 public:
  void Feed(std::string_view bytes);
  // The next complete message, if any. Throws ProtocolError on a frame that
  // exceeds kMaxFrameBytes or does not decode; the stream is then unusable.
  std::optional<Message> Next();
  size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  size_t offset_ = 0;
};

}  // namespace stylomask

#endif  // STYLOMASK_LM_PROTOCOL_H_
