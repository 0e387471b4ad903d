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

#ifndef STYLOMASK_LM_PROVIDER_H_
#define STYLOMASK_LM_PROVIDER_H_

#include "stylomask/lm_protocol.h"

namespace stylomask {

// Anything that can answer fill and encode requests: a remote model server
// behind LmClient, or an in-process ToyLm. Errors surface as ProviderError.
class LmProvider {
 public:
  virtual ~LmProvider() = default;
  virtual FillResponse Fill(const FillRequest& request) = 0;
  virtual EncodeResponse Encode(const EncodeRequest& request) = 0;
};

}  // namespace stylomask

#endif  // STYLOMASK_LM_PROVIDER_H_
