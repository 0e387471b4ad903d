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

#ifndef STYLOMASK_ERRORS_H_
#define STYLOMASK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace stylomask {

// Bad arguments or configuration supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data is missing, malformed, or insufficient for the request.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A language-model provider failed to answer.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The peer violated the wire protocol. The connection is unusable afterwards.
class ProtocolError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// No response arrived in time. The request may be retried.
class TimeoutError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

}  // namespace stylomask

#endif  // STYLOMASK_ERRORS_H_
