/* Copyright 2026 The MCUBench Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef MCUBENCH_RULES_HPP_
#define MCUBENCH_RULES_HPP_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mcubench/scoring.hpp"

namespace mcubench::runner {
struct RunReport;
}

namespace mcubench::rules {

// Pipeline stages a submission may modify. The first four may change in
// either division; touching the rest forces the open division.
enum class Component {
  kHardware,
  kInferenceFramework,
  kOptimizer,
  kQuantizationPtq,
  kModelArchitecture,
  kWeightsOrTraining,
  kDataset,
};

enum class QuantizationKind { kNone, kPtq, kQat };
enum class Division { kClosed, kOpen };

std::string_view component_name(Component c);
std::optional<Component> parse_component(std::string_view name);
std::string_view quantization_name(QuantizationKind q);
std::optional<QuantizationKind> parse_quantization(std::string_view name);
std::string_view division_name(Division d);
std::optional<Division> parse_division(std::string_view name);

struct SubmissionMeta {
  Division division = Division::kClosed;  // as declared by the submitter
  std::set<Component> modified_components;
  QuantizationKind quantization = QuantizationKind::kNone;
  std::string deviations_doc;  // required for open submissions
};

// Closed iff every modified component is deployment-stack-side (hardware,
// inference framework, optimizer, post-training quantization) and no
// retraining-grade quantization was used; anything else is open.
Division classify_division(const std::set<Component>& modified_components,
                           QuantizationKind quantization);

enum class Severity { kError, kWarning, kInfo };

struct Finding {
  std::string rule_id;   // stable citation, e.g. "closed.quality"
  Severity severity = Severity::kError;
  std::string message;

  bool operator==(const Finding&) const = default;
};

// Official run-rule constants the validator enforces regardless of how the
// session was configured.
inline constexpr std::size_t kOfficialRuns = 5;
inline constexpr double kOfficialMinRunSeconds = 10.0;
inline constexpr std::uint64_t kOfficialMinIterations = 10;

// Checks a finished report against the division rules and the measurement
// procedure. Returns the findings in a fixed check order; an empty list (or
// warnings only) means the submission is valid.
std::vector<Finding> validate_submission(const runner::RunReport& report,
                                         const SubmissionMeta& meta,
                                         const scoring::BenchmarkProfile& profile);

bool has_errors(const std::vector<Finding>& findings);

}  // namespace mcubench::rules

#endif  // MCUBENCH_RULES_HPP_
