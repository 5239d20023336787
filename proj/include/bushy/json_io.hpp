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

#ifndef BUSHY_JSON_IO_HPP_
#define BUSHY_JSON_IO_HPP_

#include <json.hpp>

#include "bushy/bigness.hpp"
#include "bushy/error.hpp"
#include "bushy/functional.hpp"
#include "bushy/hashfam.hpp"
#include "bushy/schnorr.hpp"
#include "bushy/splitcalc.hpp"
#include "bushy/thinning.hpp"
#include "bushy/trees.hpp"

// Rationals travel as ["num","den"].
namespace nlohmann {
template <>
struct adl_serializer<mpq_class> {
  static void to_json(json& j, const mpq_class& r);
  static void from_json(const json& j, mpq_class& r);
};
}  // namespace nlohmann

namespace bushy {

using Json = nlohmann::json;

#define BUSHY_JSON(T)                  \
  void to_json(Json& j, const T& v);   \
  void from_json(const Json& j, T& v);

BUSHY_JSON(LevelFn)
BUSHY_JSON(FiniteTree)
BUSHY_JSON(CylinderSet)
BUSHY_JSON(SchnorrTest)
BUSHY_JSON(ValueFunctional)
BUSHY_JSON(Expulsion)
BUSHY_JSON(BigWitness)
BUSHY_JSON(SmallTable)
BUSHY_JSON(BigDecision)
BUSHY_JSON(SplitResult)
BUSHY_JSON(MarkovSelection)
BUSHY_JSON(ThinStep)
BUSHY_JSON(ThinResult)
BUSHY_JSON(PruneResult)
BUSHY_JSON(Stage)
BUSHY_JSON(StagingResult)
BUSHY_JSON(HashFamily)
BUSHY_JSON(VCert)
BUSHY_JSON(CalculusInstance)
BUSHY_JSON(CalculusOutcome)
BUSHY_JSON(CaptureResult)
BUSHY_JSON(SplitInstance)
BUSHY_JSON(SplitParams)
BUSHY_JSON(DisjointPart)
BUSHY_JSON(DisjointCert)
BUSHY_JSON(NonTotalCert)
BUSHY_JSON(ComputableCert)
BUSHY_JSON(Inconclusive)
BUSHY_JSON(SplitCertificate)
BUSHY_JSON(Condition)
BUSHY_JSON(SplittingTree)
BUSHY_JSON(Extension)
BUSHY_JSON(StepResult)
BUSHY_JSON(TestFunctional)
BUSHY_JSON(RoundCheck)
BUSHY_JSON(RoundTrace)
BUSHY_JSON(RoundState)
BUSHY_JSON(Avoider)
BUSHY_JSON(CoveringRound)
BUSHY_JSON(CoveringResult)
BUSHY_JSON(ConditionSpec)
BUSHY_JSON(ConditionCase1)
BUSHY_JSON(ConditionCase2)
BUSHY_JSON(Classification)

#undef BUSHY_JSON

// Parse helpers that turn nlohmann exceptions into kInvalidInput errors.
Json parse_json(const std::string& text);

template <typename T>
T read_as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInvalidInput, what + ": " + e.what());
  }
}

}  // namespace bushy

#endif  // BUSHY_JSON_IO_HPP_
