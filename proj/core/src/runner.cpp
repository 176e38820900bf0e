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
#include "mcubench/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mcubench/errors.hpp"
#include "mcubench/fixture.hpp"

namespace mcubench::runner {
namespace {

using protocol::Mode;

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open stimulus: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void expect_ack(const protocol::Response& rsp, std::string_view what) {
  if (std::holds_alternative<protocol::AckRsp>(rsp)) return;
  if (const auto* err = std::get_if<protocol::ErrorRsp>(&rsp))
    throw ProtocolError(std::string(what) + ": DUT error '" +
                        std::string(protocol::error_code_token(err->code)) +
                        (err->detail.empty() ? "" : " " + err->detail) + "'");
  throw ProtocolError(std::string(what) + ": unexpected response type");
}

std::int64_t expect_timestamp(const protocol::Response& rsp) {
  if (const auto* ts = std::get_if<protocol::TimestampIsRsp>(&rsp))
    return ts->micros;
  throw ProtocolError("timestamp: unexpected response type");
}

void download_stimulus(transport::DutLink& link, const std::string& bytes,
                       std::size_t max_chunk) {
  for (const protocol::Command& cmd : protocol::chunk_input(bytes, max_chunk))
    expect_ack(link.request(cmd), "stimulus download");
  expect_ack(link.request(protocol::SetTensorCmd{}), "set-tensor");
}

double ips_from_marks(std::uint64_t iterations, std::int64_t t_start_us,
                      std::int64_t t_end_us) {
  std::int64_t elapsed = t_end_us - t_start_us;
  if (elapsed <= 0) throw MeasurementError("non-positive measured loop time");
  return static_cast<double>(iterations) * 1e6 / static_cast<double>(elapsed);
}

std::vector<std::filesystem::path> stimuli_or_throw(const SessionConfig& config) {
  auto files = fixture::list_dir(config.stimuli_dir);
  if (files.empty())
    throw MeasurementError("no stimuli in " + config.stimuli_dir.string());
  return files;
}

// Shared five-run skeleton. `elapsed_marks` produces the (t_start, t_end)
// bracketing marks of one sized loop, per the active mode's timing source.
struct MeasuredLoop {
  std::uint64_t iterations;
  std::int64_t t_start_us;
  std::int64_t t_end_us;
};

}  // namespace

std::uint64_t size_loop(std::uint64_t min_iterations, double min_run_seconds,
                        std::int64_t estimated_latency_us) {
  if (estimated_latency_us <= 0)
    throw MeasurementError("probe produced a non-positive latency estimate");
  auto floor_us = static_cast<std::uint64_t>(std::llround(min_run_seconds * 1e6));
  auto est = static_cast<std::uint64_t>(estimated_latency_us);
  std::uint64_t by_time = (floor_us + est - 1) / est;  // ceil
  return std::max(min_iterations, by_time);
}

std::string handshake(transport::DutLink& link, Mode mode) {
  protocol::Response rsp = link.request(protocol::NameCmd{});
  const auto* name = std::get_if<protocol::NameIsRsp>(&rsp);
  if (!name) throw ProtocolError("handshake: DUT did not report a name");
  expect_ack(link.request(protocol::SetModeCmd{mode}), "handshake mode");
  return name->id;
}

scoring::LatencyScore run_latency(transport::DutLink& link,
                                  const SessionConfig& config,
                                  std::vector<LatencyRunRaw>& raw_out) {
  auto files = stimuli_or_throw(config);
  scoring::LatencyScore score;

  for (std::uint32_t run = 0; run < config.n_runs; ++run) {
    const auto& file = files[run % files.size()];
    download_stimulus(link, read_file_bytes(file), config.max_chunk);

    // Probe: one untimed-window inference to estimate the loop latency.
    std::int64_t p0 = expect_timestamp(link.request(protocol::TimestampCmd{}));
    expect_ack(link.request(protocol::InferCmd{1, 0}), "probe infer");
    std::int64_t p1 = expect_timestamp(link.request(protocol::TimestampCmd{}));
    std::uint64_t iterations =
        size_loop(config.min_iterations, config.min_run_seconds, p1 - p0);

    std::int64_t t0 = expect_timestamp(link.request(protocol::TimestampCmd{}));
    expect_ack(link.request(protocol::InferCmd{iterations, 0}), "measured infer");
    std::int64_t t1 = expect_timestamp(link.request(protocol::TimestampCmd{}));

    raw_out.push_back({file.filename().string(), iterations, t0, t1});
    score.per_run_ips.push_back(ips_from_marks(iterations, t0, t1));
  }
  score.median_ips = scoring::median_of_runs(score.per_run_ips);
  return score;
}

scoring::AccuracyScore run_accuracy(transport::DutLink& link,
                                    const SessionConfig& config,
                                    std::vector<AccuracyRowRaw>& rows_out) {
  auto files = stimuli_or_throw(config);
  const auto& profile = config.benchmark;

  std::vector<std::vector<double>> outputs;
  std::vector<std::uint32_t> labels;
  std::vector<double> file_scores;
  std::vector<bool> anomalous;

  for (const auto& file : files) {
    fixture::Fixture meta = fixture::read_file(file);
    download_stimulus(link, read_file_bytes(file), config.max_chunk);
    expect_ack(link.request(protocol::InferCmd{1, 0}), "accuracy infer");
    protocol::Response rsp = link.request(protocol::GetResultsCmd{});
    const auto* result = std::get_if<protocol::ResultTensorRsp>(&rsp);
    if (!result) throw ProtocolError("results: unexpected response type");

    if (profile.metric_kind == scoring::MetricKind::kTop1) {
      if (result->values.size() != profile.n_classes)
        throw MeasurementError("result tensor arity mismatch: got " +
                               std::to_string(result->values.size()) +
                               ", expected " + std::to_string(profile.n_classes));
      outputs.push_back(result->values);
      labels.push_back(meta.label_class());
    } else {
      if (result->values.size() != meta.ad_window_count())
        throw MeasurementError("result tensor arity mismatch: got " +
                               std::to_string(result->values.size()) +
                               " window scores, expected " +
                               std::to_string(meta.ad_window_count()));
      file_scores.push_back(scoring::anomaly_file_score(
          result->values, meta.central_begin, meta.central_end));
      anomalous.push_back(meta.anomalous());
    }
    rows_out.push_back({file.filename().string(), meta.label, meta.central_begin,
                        meta.central_end, result->values});
  }

  scoring::AccuracyScore score;
  score.metric_kind = profile.metric_kind;
  score.n_inputs = files.size();
  if (profile.metric_kind == scoring::MetricKind::kTop1) {
    score.value = scoring::top1(outputs, labels);
  } else {
    score.value = scoring::auc_roc(file_scores, anomalous);
  }
  return score;
}

EnergyOutcome run_energy(transport::DutLink& link, const SessionConfig& config,
                         std::vector<LatencyRunRaw>& raw_out) {
  auto files = stimuli_or_throw(config);

  double idle_mw = 0.0;
  double shifter_mw = 0.0;
  bool have_idle = false;
  bool have_shifter = false;
  struct ActiveSpan {
    std::int64_t t0_us, t1_us;
    double mw;
  };
  std::vector<ActiveSpan> activity;
  std::vector<std::int64_t> session_triggers_us;

  // Sorts drained tap events into the session power timeline; returns just
  // the edges so each phase can decide whether its edges count as triggers.
  auto absorb = [&](std::vector<dut::DutEvent> events) {
    std::vector<std::int64_t> edges;
    for (const auto& e : events) {
      switch (e.kind) {
        case dut::DutEvent::Kind::kPowerIdle:
          idle_mw = e.mw;
          have_idle = true;
          break;
        case dut::DutEvent::Kind::kPowerShifter:
          shifter_mw = e.mw;
          have_shifter = true;
          break;
        case dut::DutEvent::Kind::kEdge:
          edges.push_back(e.t0_us);
          break;
        case dut::DutEvent::Kind::kActive:
          activity.push_back({e.t0_us, e.t1_us, e.mw});
          break;
      }
    }
    return edges;
  };

  scoring::LatencyScore latency;
  scoring::EnergyScore energy;

  for (std::uint32_t run = 0; run < config.n_runs; ++run) {
    const auto& file = files[run % files.size()];
    download_stimulus(link, read_file_bytes(file), config.max_chunk);
    absorb(link.drain_events());

    // Probe; its edges are real GPIO toggles but are not armed as triggers.
    expect_ack(link.request(protocol::TimestampCmd{}), "probe timestamp");
    expect_ack(link.request(protocol::InferCmd{1, 0}), "probe infer");
    expect_ack(link.request(protocol::TimestampCmd{}), "probe timestamp");
    std::vector<std::int64_t> probe_edges = absorb(link.drain_events());
    if (probe_edges.size() != 2)
      throw MeasurementError("probe produced " +
                             std::to_string(probe_edges.size()) +
                             " trigger edges, expected 2");
    std::uint64_t iterations = size_loop(
        config.min_iterations, config.min_run_seconds,
        probe_edges[1] - probe_edges[0]);

    expect_ack(link.request(protocol::TimestampCmd{}), "window timestamp");
    expect_ack(link.request(protocol::InferCmd{iterations, 0}), "measured infer");
    expect_ack(link.request(protocol::TimestampCmd{}), "window timestamp");
    std::vector<std::int64_t> loop_edges = absorb(link.drain_events());
    if (loop_edges.size() != 2)
      throw MeasurementError("measured loop produced " +
                             std::to_string(loop_edges.size()) +
                             " trigger edges, expected 2");

    session_triggers_us.insert(session_triggers_us.end(), loop_edges.begin(),
                               loop_edges.end());
    raw_out.push_back(
        {file.filename().string(), iterations, loop_edges[0], loop_edges[1]});
    latency.per_run_ips.push_back(
        ips_from_marks(iterations, loop_edges[0], loop_edges[1]));
    energy.inferences_in_window.push_back(iterations);
  }

  if (!have_idle || !have_shifter)
    throw MeasurementError("DUT tap never reported its power levels");

  // Realize the whole session as one trace on the monitor's sample grid.
  emon::PiecewisePower profile(idle_mw, shifter_mw);
  std::sort(activity.begin(), activity.end(),
            [](const ActiveSpan& a, const ActiveSpan& b) { return a.t0_us < b.t0_us; });
  for (std::size_t i = 0; i < activity.size(); ++i) {
    profile.add_step(static_cast<double>(activity[i].t0_us) * 1e-6,
                     activity[i].mw, shifter_mw);
    bool abuts_next =
        i + 1 < activity.size() && activity[i + 1].t0_us <= activity[i].t1_us;
    if (!abuts_next)
      profile.add_step(static_cast<double>(activity[i].t1_us) * 1e-6, idle_mw,
                       shifter_mw);
  }

  std::vector<double> triggers_s(session_triggers_us.size());
  std::transform(session_triggers_us.begin(), session_triggers_us.end(),
                 triggers_s.begin(),
                 [](std::int64_t us) { return static_cast<double>(us) * 1e-6; });
  double session_end_s =
      activity.empty() ? 0.0 : static_cast<double>(activity.back().t1_us) * 1e-6;

  emon::EnergyTrace trace =
      emon::simulate_trace(profile, triggers_s, config.emon.sample_rate_hz,
                           config.emon.supply_voltage_v, session_end_s);

  // Consecutive trigger pairs bracket the runs, in order.
  for (std::uint32_t run = 0; run < config.n_runs; ++run) {
    emon::Window window{triggers_s[2 * run], triggers_s[2 * run + 1]};
    double joules = emon::integrate_joules(trace, window, emon::Channel::kDut);
    energy.window_joules.push_back(joules);
    energy.uj_per_inference.push_back(scoring::energy_per_inference_uj(
        joules, energy.inferences_in_window[run]));
  }
  latency.median_ips = scoring::median_of_runs(latency.per_run_ips);
  energy.median_of_five_uj = scoring::median_of_runs(energy.uj_per_inference);
  return {std::move(latency), std::move(energy), std::move(trace)};
}

SessionResult run_session(transport::DutLink& link, const SessionConfig& config,
                          const rules::SubmissionMeta& meta) {
  SessionResult result;
  RunReport& report = result.report;
  report.benchmark_id = config.benchmark.id;
  report.mode = config.mode;
  report.submission = meta;
  report.min_run_seconds = config.min_run_seconds;
  report.min_iterations = config.min_iterations;
  report.n_runs = config.n_runs;
  report.max_chunk = config.max_chunk;
  if (config.mode == Mode::kEnergy) report.emon = config.emon;

  report.dut_name = handshake(link, config.mode);

  if (config.measure_performance) {
    if (config.mode == Mode::kPerformance) {
      report.latency = run_latency(link, config, report.latency_runs);
    } else {
      EnergyOutcome outcome = run_energy(link, config, report.latency_runs);
      report.latency = std::move(outcome.latency);
      report.energy = std::move(outcome.energy);
      result.trace = std::move(outcome.trace);
    }
  }
  if (config.measure_accuracy) {
    report.accuracy = run_accuracy(link, config, result.accuracy_rows);
  }
  if (!report.latency && !report.accuracy && !report.energy)
    throw ContractError("session produced no scores; enable a procedure");

  for (const auto& run : report.latency_runs)
    report.measured_span_us = std::max(report.measured_span_us, run.t_end_us);
  return result;
}

}  // namespace mcubench::runner
