// Copyright 2026 The Bushy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BUSHY_SCENARIO_HPP_
#define BUSHY_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "bushy/json_io.hpp"

namespace bushy {

// Process exit codes.
enum class Status : int {
  kOk = 0,
  kInvalid = 1,
  kRefusal = 2,
  kInconclusive = 3,
  kPrecondition = 4,
  kInternal = 5,
};

const char* status_name(Status s);
Status status_of(ErrorKind k);

struct Caps {
  uint32_t branching = 24;
  unsigned depth = 6;
  unsigned ground = 16;  // hash N
  unsigned j = 4;
};

Caps caps_from_json(const Json& j);

const std::vector<std::string>& scenario_kinds();

// {"kind", "seed", "params", "instance"}. Deterministic in (kind, params, seed).
Json generate(const std::string& kind, const Json& params, uint64_t seed, const Caps& caps = {});

// {"kind", "seed", "status", "exit", "message", "certificate", "facts"}.
// Never throws for op errors; they become the status.
Json run_scenario(const Json& scenario);

// {"ok", "detail"}: re-checks the certificate of a result against the
// scenario's instance.
Json verify_result(const Json& result, const Json& scenario);

// Aggregates results and verdicts; timings are optional per-result
// milliseconds keyed like the results.
Json report(const std::vector<Json>& results, const std::vector<Json>& verdicts,
            const std::vector<double>& timings_ms = {});
std::string report_markdown(const Json& summary);

// A mixed plan of count scenarios cycling through the kinds.
std::vector<Json> suite_plan(size_t count, uint64_t seed, const Caps& caps = {});

}  // namespace bushy

#endif  // BUSHY_SCENARIO_HPP_
