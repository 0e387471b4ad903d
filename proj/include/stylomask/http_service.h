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

#ifndef STYLOMASK_HTTP_SERVICE_H_
#define STYLOMASK_HTTP_SERVICE_H_

#include "stylomask/service.h"

namespace httplib {
class Server;
}

namespace stylomask {

// REST routes over a SessionManager:
//   POST /session                      {"text","label","model"?}
//   GET  /session/{id}/importance
//   GET  /session/{id}/candidates?position=&generator=&top_k=
//   POST /session/{id}/edit            {"position","surface"}
//   POST /session/{id}/revert
//   POST /session/{id}/auto            AttackConfig fields; JSON lines stream
//   GET  /session/{id}/export
//   GET  /models
// Errors come back as {"error": message} with a 4xx/5xx status.
void RegisterRoutes(httplib::Server& server, SessionManager& manager);

}  // namespace stylomask

#endif  // STYLOMASK_HTTP_SERVICE_H_
