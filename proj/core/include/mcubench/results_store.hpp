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
#ifndef MCUBENCH_RESULTS_STORE_HPP_
#define MCUBENCH_RESULTS_STORE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcubench/emon.hpp"
#include "mcubench/runner.hpp"

namespace mcubench::store {

// Results folder layout (all names fixed):
//   manifest.json         report: ids, scores, submission meta, tool version
//   latency_run_<k>.csv   raw loop marks per run, k = 1..n_runs
//   accuracy_outputs.csv  per-stimulus output tensors with fixture metadata
//   trace.csv             energy trace samples (energy mode)
//   triggers.csv          trigger edges, one per line (energy mode)
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kAccuracyName = "accuracy_outputs.csv";
inline constexpr const char* kTraceName = "trace.csv";
inline constexpr const char* kTriggersName = "triggers.csv";

struct RawData {
  std::vector<runner::AccuracyRowRaw> accuracy_rows;
  std::optional<emon::EnergyTrace> trace;
};

// Writes the folder with a deterministic byte-for-byte layout: saving the
// same report twice produces identical files. Throws StoreError on IO
// failure.
void save(const runner::RunReport& report, const RawData& raw,
          const std::filesystem::path& dir);

struct LoadedFolder {
  runner::RunReport report;
  RawData raw;
};

// Reconstructs the report and raw data; checks the schema version. Throws
// StoreError for a missing manifest, schema mismatch, or corrupt raw files.
LoadedFolder load(const std::filesystem::path& dir);

// Recomputes every score from the stored raw data alone. For an untampered
// folder the result equals the manifest bit for bit.
runner::RunReport rescore(const std::filesystem::path& dir);

// Field-by-field bitwise comparison of the score blocks; returns one message
// per mismatch, empty when the reports agree.
std::vector<std::string> diff_scores(const runner::RunReport& manifest,
                                     const runner::RunReport& rescored);

}  // namespace mcubench::store

#endif  // MCUBENCH_RESULTS_STORE_HPP_
