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
#ifndef MCUBENCH_FIXTURE_HPP_
#define MCUBENCH_FIXTURE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mcubench/scoring.hpp"

namespace mcubench::fixture {

// One stimulus file: a 24-byte little-endian header followed by the input
// tensor as IEEE-754 binary32 values.
//
//   u32 magic          "MBF1" (0x3146424d)
//   u32 benchmark_id   0 kws, 1 vww, 2 ic, 3 ad
//   u32 tensor_len     number of f32 values that follow
//   f32 label          classifiers: class index; ad: 1.0 anomalous, 0.0 normal
//   u32 central_begin  ad: first window index of the scored central span
//   u32 central_end    ad: one past the last scored window; 0,0 otherwise
//
// For ad the tensor holds `tensor_len / 640` non-overlapping autoencoder
// windows of 640 values each; the central span indexes those windows.
inline constexpr std::uint32_t kFixtureMagic = 0x3146424d;
inline constexpr std::uint32_t kAdWindowLen = 640;  // 5 frames x 128 bands

struct Fixture {
  scoring::UseCase use_case = scoring::UseCase::kIc;
  std::vector<float> tensor;
  float label = 0.0f;
  std::uint32_t central_begin = 0;
  std::uint32_t central_end = 0;

  std::uint32_t label_class() const { return static_cast<std::uint32_t>(label); }
  bool anomalous() const { return label != 0.0f; }
  std::size_t ad_window_count() const { return tensor.size() / kAdWindowLen; }
};

std::string serialize(const Fixture& fixture);
// Throws ContractError when the bytes are not a well-formed fixture.
Fixture deserialize(const std::string& bytes);

void write_file(const std::filesystem::path& path, const Fixture& fixture);
Fixture read_file(const std::filesystem::path& path);

// Lexicographically sorted fixture files ("*.bin") under dir.
std::vector<std::filesystem::path> list_dir(const std::filesystem::path& dir);

// ---- Synthetic dataset generation ----
//
// Classifier fixtures embed both the ground-truth label and the class the
// stub kernel will predict: the first n_classes tensor values are logits
// peaking at `predicted`, the rest is seeded filler noise.
Fixture make_classifier_fixture(const scoring::BenchmarkProfile& profile,
                                std::uint32_t label, std::uint32_t predicted,
                                std::uint64_t seed);

// AD fixtures hold n_windows autoencoder windows whose zero-reconstruction
// MSE equals window_mses[w]; the central span is carried in the header.
Fixture make_ad_fixture(const std::vector<double>& window_mses,
                        std::uint32_t central_begin, std::uint32_t central_end,
                        bool anomalous);

struct DatasetSpec {
  scoring::UseCase use_case = scoring::UseCase::kIc;
  std::uint32_t count = 20;
  // Classifier sets: how many fixtures the stub kernel gets right.
  std::uint32_t correct = 20;
  // AD sets: anomalous files score around 4x the normal base MSE.
  std::uint32_t anomalous = 0;
  std::uint64_t seed = 1;
};

// Writes `spec.count` fixtures named stim_0000.bin.. into dir (created if
// missing). Deterministic for a fixed spec.
void generate_dataset(const std::filesystem::path& dir, const DatasetSpec& spec);

}  // namespace mcubench::fixture

#endif  // MCUBENCH_FIXTURE_HPP_
