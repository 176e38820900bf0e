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
#include "mcubench/rules.hpp"

#include <array>
#include <cmath>

#include "mcubench/errors.hpp"
#include "mcubench/numfmt.hpp"
#include "mcubench/runner.hpp"

namespace mcubench::rules {
namespace {

constexpr std::array<std::pair<Component, std::string_view>, 7> kComponentNames = {{
    {Component::kHardware, "hardware"},
    {Component::kInferenceFramework, "inference_framework"},
    {Component::kOptimizer, "optimizer"},
    {Component::kQuantizationPtq, "quantization_ptq"},
    {Component::kModelArchitecture, "model_architecture"},
    {Component::kWeightsOrTraining, "weights_or_training"},
    {Component::kDataset, "dataset"},
}};

bool deployment_stack_side(Component c) {
  switch (c) {
    case Component::kHardware:
    case Component::kInferenceFramework:
    case Component::kOptimizer:
    case Component::kQuantizationPtq:
      return true;
    case Component::kModelArchitecture:
    case Component::kWeightsOrTraining:
    case Component::kDataset:
      return false;
  }
  return false;
}

}  // namespace

std::string_view component_name(Component c) {
  for (const auto& [component, name] : kComponentNames)
    if (component == c) return name;
  return "?";
}

std::optional<Component> parse_component(std::string_view name) {
  for (const auto& [component, cname] : kComponentNames)
    if (cname == name) return component;
  return std::nullopt;
}

std::string_view quantization_name(QuantizationKind q) {
  switch (q) {
    case QuantizationKind::kNone: return "none";
    case QuantizationKind::kPtq:  return "ptq";
    case QuantizationKind::kQat:  return "qat";
  }
  return "none";
}

std::optional<QuantizationKind> parse_quantization(std::string_view name) {
  if (name == "none") return QuantizationKind::kNone;
  if (name == "ptq") return QuantizationKind::kPtq;
  if (name == "qat") return QuantizationKind::kQat;
  return std::nullopt;
}

std::string_view division_name(Division d) {
  return d == Division::kClosed ? "closed" : "open";
}

std::optional<Division> parse_division(std::string_view name) {
  if (name == "closed") return Division::kClosed;
  if (name == "open") return Division::kOpen;
  return std::nullopt;
}

Division classify_division(const std::set<Component>& modified_components,
                           QuantizationKind quantization) {
  if (quantization == QuantizationKind::kQat) return Division::kOpen;
  for (Component c : modified_components) {
    if (!deployment_stack_side(c)) return Division::kOpen;
  }
  return Division::kClosed;
}

bool has_errors(const std::vector<Finding>& findings) {
  for (const auto& f : findings)
    if (f.severity == Severity::kError) return true;
  return false;
}

std::vector<Finding> validate_submission(const runner::RunReport& report,
                                         const SubmissionMeta& meta,
                                         const scoring::BenchmarkProfile& profile) {
  std::vector<Finding> findings;
  auto add = [&findings](std::string rule_id, Severity severity, std::string message) {
    findings.push_back({std::move(rule_id), severity, std::move(message)});
  };

  bool closed = meta.division == Division::kClosed;

  // Declared division must be reachable from the declared modifications.
  Division derived = classify_division(meta.modified_components, meta.quantization);
  if (closed && derived == Division::kOpen) {
    std::string mods;
    for (Component c : meta.modified_components) {
      if (!mods.empty()) mods += ", ";
      mods += component_name(c);
    }
    add("division.consistency", Severity::kError,
        "declared closed but the modifications {" + mods + "} with " +
            std::string(quantization_name(meta.quantization)) +
            " quantization require the open division");
  }

  if (!report.latency && !report.accuracy && !report.energy)
    add("report.scores", Severity::kError, "report carries no scores");

  // Quality gate: binding in closed, advisory in open.
  if (report.accuracy) {
    if (report.accuracy->metric_kind != profile.metric_kind) {
      add("accuracy.metric", Severity::kError,
          "accuracy metric does not match the benchmark's quality metric");
    } else {
      bool pass = scoring::check_quality(profile, *report.accuracy) ==
                  scoring::QualityVerdict::kPass;
      if (!pass) {
        std::string msg = "accuracy " + numfmt::format_double(report.accuracy->value) +
                          " below the " + profile.id + " quality target " +
                          numfmt::format_double(profile.quality_threshold);
        if (closed) {
          add("closed.quality", Severity::kError, msg + "; score is invalid");
        } else {
          add("open.quality", Severity::kWarning, msg + "; annotated, open division");
        }
      }
    }
  } else if (closed) {
    add("closed.accuracy-missing", Severity::kError,
        "closed submissions must demonstrate the quality target");
  }

  // Measurement procedure: five repeats, each at least 10 s and 10 iterations.
  if (report.latency) {
    if (report.latency->per_run_ips.size() != kOfficialRuns ||
        report.latency_runs.size() != kOfficialRuns) {
      add("latency.five-runs", Severity::kError,
          "measurement requires exactly " + std::to_string(kOfficialRuns) +
              " runs, found " + std::to_string(report.latency_runs.size()));
    }
    for (std::size_t i = 0; i < report.latency_runs.size(); ++i) {
      const auto& run = report.latency_runs[i];
      if (run.iterations < kOfficialMinIterations) {
        add("latency.min-iterations", Severity::kError,
            "run " + std::to_string(i + 1) + " looped " +
                std::to_string(run.iterations) + " times; minimum is " +
                std::to_string(kOfficialMinIterations));
      }
      double seconds =
          static_cast<double>(run.t_end_us - run.t_start_us) * 1e-6;
      if (seconds + 1e-9 < kOfficialMinRunSeconds) {
        add("latency.min-duration", Severity::kError,
            "run " + std::to_string(i + 1) + " measured " +
                numfmt::format_double(seconds) + " s; minimum is " +
                numfmt::format_double(kOfficialMinRunSeconds) + " s");
      }
    }
    // The reported median must be the median of the reported runs.
    if (report.latency->per_run_ips.size() == 5) {
      double recomputed = scoring::median_of_five(report.latency->per_run_ips);
      if (recomputed != report.latency->median_ips) {
        add("latency.median", Severity::kError,
            "median IPS does not match the per-run values");
      }
    }
  }

  if (report.energy && report.mode != protocol::Mode::kEnergy) {
    add("energy.mode", Severity::kError,
        "energy score present outside an energy-mode session");
  }
  if (report.energy && report.energy->uj_per_inference.size() == 5) {
    double recomputed = scoring::median_of_five(report.energy->uj_per_inference);
    if (recomputed != report.energy->median_of_five_uj) {
      add("energy.median", Severity::kError,
          "median energy does not match the per-run values");
    }
  }

  if (!closed && meta.deviations_doc.empty()) {
    add("open.deviations-doc", Severity::kError,
        "open submissions must document how they deviate from the reference");
  }

  return findings;
}

}  // namespace mcubench::rules
