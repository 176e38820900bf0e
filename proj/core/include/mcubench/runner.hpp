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
#ifndef MCUBENCH_RUNNER_HPP_
#define MCUBENCH_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcubench/emon.hpp"
#include "mcubench/protocol.hpp"
#include "mcubench/rules.hpp"
#include "mcubench/scoring.hpp"
#include "mcubench/transport.hpp"

namespace mcubench::runner {

struct EmonConfig {
  double sample_rate_hz = 1000.0;
  double supply_voltage_v = 3.0;
};

struct SessionConfig {
  protocol::Mode mode = protocol::Mode::kPerformance;
  std::filesystem::path stimuli_dir;
  scoring::BenchmarkProfile benchmark;
  EmonConfig emon;                 // energy mode only
  double min_run_seconds = 10.0;   // per measured inference loop
  std::uint64_t min_iterations = 10;
  std::uint32_t n_runs = 5;        // 5 for official scoring
  std::size_t max_chunk = protocol::kDefaultMaxChunk;
  bool measure_performance = true;  // latency (or latency+energy) procedure
  bool measure_accuracy = true;
};

// One measured inference loop: the stimulus used, the loop size, and the
// virtual-time marks bracketing it (timestamp replies in performance mode,
// trigger edges in energy mode). IPS is derived, never stored.
struct LatencyRunRaw {
  std::string stimulus;
  std::uint64_t iterations = 0;
  std::int64_t t_start_us = 0;
  std::int64_t t_end_us = 0;
};

// One accuracy inference: the DUT's output tensor plus the fixture metadata
// needed to re-derive the benchmark score offline.
struct AccuracyRowRaw {
  std::string stimulus;
  float label = 0.0f;
  std::uint32_t central_begin = 0;
  std::uint32_t central_end = 0;
  std::vector<double> outputs;
};

struct RunReport {
  std::string benchmark_id;
  protocol::Mode mode = protocol::Mode::kPerformance;
  std::string dut_name;
  std::optional<scoring::LatencyScore> latency;
  std::optional<scoring::AccuracyScore> accuracy;
  std::optional<scoring::EnergyScore> energy;   // energy mode only
  std::vector<LatencyRunRaw> latency_runs;      // raw timestamps per run
  std::int64_t measured_span_us = 0;            // last virtual mark observed
  rules::SubmissionMeta submission;
  // Session parameters, persisted so stored results stay reproducible.
  double min_run_seconds = 10.0;
  std::uint64_t min_iterations = 10;
  std::uint32_t n_runs = 5;
  std::size_t max_chunk = protocol::kDefaultMaxChunk;
  std::optional<EmonConfig> emon;
};

struct SessionResult {
  RunReport report;
  std::vector<AccuracyRowRaw> accuracy_rows;
  std::optional<emon::EnergyTrace> trace;  // energy mode only
};

// Sends `name` and pins the session mode; returns the device's reported id.
// Safe to repeat: the DUT answers identically.
std::string handshake(transport::DutLink& link, protocol::Mode mode);

// The latency procedure: five times, download a stimulus, set the tensor,
// size the loop from a one-inference warmup probe so it covers at least
// min_run_seconds and min_iterations, and time the loop with timestamp
// commands. Performance mode only.
scoring::LatencyScore run_latency(transport::DutLink& link,
                                  const SessionConfig& config,
                                  std::vector<LatencyRunRaw>& raw_out);

// The accuracy procedure: one inference per stimulus in sorted filename
// order, scoring Top-1 or AUC per the benchmark profile.
scoring::AccuracyScore run_accuracy(transport::DutLink& link,
                                    const SessionConfig& config,
                                    std::vector<AccuracyRowRaw>& rows_out);

struct EnergyOutcome {
  scoring::LatencyScore latency;
  scoring::EnergyScore energy;
  emon::EnergyTrace trace;
};

// The energy procedure: identical to latency, but timestamps fall as GPIO
// edges, the simulated monitor realizes the DUT's power timeline as a trace,
// and each run's energy is integrated over its trigger-bracketed window.
EnergyOutcome run_energy(transport::DutLink& link, const SessionConfig& config,
                         std::vector<LatencyRunRaw>& raw_out);

// Full session per the configured mode: handshake, measurement procedures,
// assembled report. Deterministic for a fixed config and DUT.
SessionResult run_session(transport::DutLink& link, const SessionConfig& config,
                          const rules::SubmissionMeta& meta);

// Loop sizing rule shared by the latency and energy procedures.
std::uint64_t size_loop(std::uint64_t min_iterations, double min_run_seconds,
                        std::int64_t estimated_latency_us);

}  // namespace mcubench::runner

#endif  // MCUBENCH_RUNNER_HPP_
