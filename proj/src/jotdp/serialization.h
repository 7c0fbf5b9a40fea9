// Copyright 2026 The jotdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON and CSV forms of every artifact. JSON documents carry
// {"schema": "jotdp/v1", "version": ...}. Probabilities are strings so they
// survive a round trip: exact masses as "num/den", real masses as decimals
// with enough digits to reproduce the 100-digit value.

#ifndef JOTDP_SERIALIZATION_H_
#define JOTDP_SERIALIZATION_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "jotdp/catalog.h"
#include "jotdp/distributions.h"
#include "jotdp/mechanisms.h"
#include "jotdp/verifier.h"
#include "json.hpp"

namespace jotdp {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "jotdp/v1";

std::string_view Version();

// {"schema", "version"}; documents are built on top of this.
Json Header();
// Checks the schema tag of a parsed document.
absl::Status CheckHeader(const Json& doc);

std::string RealToString(const Real& x);
absl::StatusOr<Real> ParseReal(const std::string& text);

Json PmfToJson(const Pmf& pmf);
absl::StatusOr<Pmf> PmfFromJson(const Json& doc);
// outcome,mass with decimal masses.
std::string PmfToCsv(const Pmf& pmf);

Json ResultToJson(const MechanismResult& result);
absl::StatusOr<MechanismResult> ResultFromJson(const Json& doc);

Json ReportToJson(const EpsilonReport& report);
absl::StatusOr<EpsilonReport> ReportFromJson(const Json& doc);

Json JointDistToJson(const JointDist& dist);
absl::StatusOr<JointDist> JointDistFromJson(const Json& doc);
// output,runtime,mass
std::string JointDistToCsv(const JointDist& dist);

Json ScheduleToJson(const std::vector<ScheduleRow>& rows);
// i,eps,beta,m,eps_sum
std::string ScheduleToCsv(const std::vector<ScheduleRow>& rows);

Json SpecToJson(const MechanismSpec& spec);
// Missing keys keep their defaults; unknown keys are rejected.
absl::StatusOr<MechanismSpec> SpecFromJson(const Json& doc);

Json SupportDemoToJson(const SupportDemoReport& report);
// n,output
std::string SupportDemoToCsv(const SupportDemoReport& report);

// Dataset shorthands: "empty", "ones:N", "zeros:N", "file:PATH" (integers
// separated by whitespace or commas), or an inline list "1,0,1" / "[1,0,1]".
absl::StatusOr<Dataset> ParseDataset(std::string_view text, int64_t delta);

}  // namespace jotdp

#endif  // JOTDP_SERIALIZATION_H_
