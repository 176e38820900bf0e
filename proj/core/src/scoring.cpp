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
#include "mcubench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcubench/errors.hpp"

namespace mcubench::scoring {
namespace {

const std::array<BenchmarkProfile, 4> kProfiles = {{
    {UseCase::kKws, "kws", {49, 10, 1}, 12, MetricKind::kTop1, 0.90},
    {UseCase::kVww, "vww", {96, 96, 3}, 2, MetricKind::kTop1, 0.80},
    {UseCase::kIc, "ic", {32, 32, 3}, 10, MetricKind::kTop1, 0.85},
    {UseCase::kAd, "ad", {5, 128, 1}, 0, MetricKind::kAuc, 0.85},
}};

}  // namespace

const BenchmarkProfile& profile_for(UseCase use_case) {
  return kProfiles[static_cast<std::size_t>(use_case)];
}

const BenchmarkProfile* find_profile(std::string_view id) {
  for (const auto& p : kProfiles) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::size_t input_tensor_len(const BenchmarkProfile& profile) {
  return static_cast<std::size_t>(profile.input_shape[0]) *
         profile.input_shape[1] * profile.input_shape[2];
}

double median_of_five(std::span<const double> values) {
  if (values.size() != 5)
    throw ContractError("median_of_five: expected exactly 5 values");
  std::array<double, 5> sorted;
  for (std::size_t i = 0; i < 5; ++i) {
    if (!std::isfinite(values[i]))
      throw ContractError("median_of_five: non-finite value");
    sorted[i] = values[i];
  }
  std::nth_element(sorted.begin(), sorted.begin() + 2, sorted.end());
  return sorted[2];
}

double median_of_runs(std::span<const double> values) {
  if (values.empty()) throw ContractError("median_of_runs: no values");
  if (values.size() == 5) return median_of_five(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

double top1(const std::vector<std::vector<double>>& outputs,
            const std::vector<std::uint32_t>& labels) {
  if (outputs.size() != labels.size())
    throw ContractError("top1: outputs/labels length mismatch");
  if (outputs.empty()) throw ContractError("top1: empty input set");
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& out = outputs[i];
    if (out.empty()) throw ContractError("top1: empty output vector");
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.size(); ++k) {
      if (out[k] > out[best]) best = k;  // strict: ties keep the lowest index
    }
    if (best == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(outputs.size());
}

double auc_roc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size())
    throw ContractError("auc_roc: scores/labels length mismatch");
  std::size_t n_pos = 0;
  for (bool anomalous : labels) n_pos += anomalous ? 1 : 0;
  std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ContractError("auc_roc: need at least one sample of each class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midrank sum over the anomalous class; tied scores share the average rank.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) pos_rank_sum += midrank;
    }
    i = j + 1;
  }
  double u = pos_rank_sum -
             static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double energy_per_inference_uj(double joules, std::uint64_t inferences) {
  if (inferences == 0) throw ContractError("energy_per_inference: zero inferences");
  if (!(joules >= 0.0)) throw ContractError("energy_per_inference: negative joules");
  return joules * 1e6 / static_cast<double>(inferences);
}

double anomaly_file_score(std::span<const double> window_mses,
                          std::size_t central_begin, std::size_t central_end) {
  if (central_begin >= central_end || central_end > window_mses.size())
    throw ContractError("anomaly_file_score: empty or out-of-bounds range");
  double sum = 0.0;
  for (std::size_t i = central_begin; i < central_end; ++i) sum += window_mses[i];
  return sum / static_cast<double>(central_end - central_begin);
}

QualityVerdict check_quality(const BenchmarkProfile& profile,
                             const AccuracyScore& score) {
  if (score.metric_kind != profile.metric_kind)
    throw ContractError("check_quality: metric kind mismatch");
  return score.value >= profile.quality_threshold ? QualityVerdict::kPass
                                                  : QualityVerdict::kFail;
}

std::string_view metric_kind_name(MetricKind kind) {
  return kind == MetricKind::kTop1 ? "top1" : "auc";
}

std::string_view use_case_name(UseCase use_case) {
  return profile_for(use_case).id;
}

}  // namespace mcubench::scoring
