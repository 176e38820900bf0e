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
#ifndef MCUBENCH_SCORING_HPP_
#define MCUBENCH_SCORING_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcubench::scoring {

enum class UseCase { kKws, kVww, kIc, kAd };
enum class MetricKind { kTop1, kAuc };

struct BenchmarkProfile {
  UseCase use_case;
  std::string id;                    // "kws" | "vww" | "ic" | "ad"
  std::array<std::uint32_t, 3> input_shape;  // flattened product = tensor length
  std::uint32_t n_classes;           // classifier output width; 0 for AD
  MetricKind metric_kind;
  double quality_threshold;          // Top-1 fraction or AUC
};

// The four fixed benchmark definitions. Thresholds: kws 0.90, vww 0.80,
// ic 0.85 (Top-1); ad 0.85 (AUC).
const BenchmarkProfile& profile_for(UseCase use_case);
const BenchmarkProfile* find_profile(std::string_view id);
std::size_t input_tensor_len(const BenchmarkProfile& profile);

struct LatencyScore {
  std::vector<double> per_run_ips;  // inferences/second, one per run
  double median_ips = 0.0;
};

struct AccuracyScore {
  MetricKind metric_kind = MetricKind::kTop1;
  double value = 0.0;  // fraction in [0,1]
  std::uint64_t n_inputs = 0;
};

struct EnergyScore {
  std::vector<double> window_joules;            // per run
  std::vector<std::uint64_t> inferences_in_window;  // per run
  std::vector<double> uj_per_inference;         // per run
  double median_of_five_uj = 0.0;
};

enum class QualityVerdict { kPass, kFail };

// The third order statistic of exactly five finite values.
double median_of_five(std::span<const double> values);

// Median over however many runs actually executed: the lower-middle order
// statistic, which coincides with median_of_five at the official count.
double median_of_runs(std::span<const double> values);

// Fraction of inputs whose argmax prediction equals the label. Argmax ties
// break toward the lowest class index.
double top1(const std::vector<std::vector<double>>& outputs,
            const std::vector<std::uint32_t>& labels);

// Mann-Whitney AUC: over all (anomalous, normal) pairs, the fraction where
// the anomalous score is higher, counting ties as half. Computed via
// midranks in O(n log n); labels are true for anomalous.
double auc_roc(std::span<const double> scores, const std::vector<bool>& labels);

double energy_per_inference_uj(double joules, std::uint64_t inferences);

// Mean of the per-window MSEs over [central_begin, central_end).
double anomaly_file_score(std::span<const double> window_mses,
                          std::size_t central_begin, std::size_t central_end);

// Pass iff value >= threshold. The metric kind must match the profile's.
QualityVerdict check_quality(const BenchmarkProfile& profile,
                             const AccuracyScore& score);

std::string_view metric_kind_name(MetricKind kind);
std::string_view use_case_name(UseCase use_case);

}  // namespace mcubench::scoring

#endif  // MCUBENCH_SCORING_HPP_
