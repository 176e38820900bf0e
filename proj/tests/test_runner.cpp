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

#include <doctest.h>

#include <cmath>

#include "mcubench/dut_sim.hpp"
#include "mcubench/errors.hpp"
#include "mcubench/fixture.hpp"
#include "test_util.hpp"

using namespace mcubench;
using protocol::Mode;

namespace {

struct Rig {
  Rig(scoring::UseCase use_case, std::int64_t latency_us, dut::PowerModel power,
      double shifter_mw = 10.0) {
    dut::DutConfig config;
    config.name = "rig-dut";
    config.use_case = use_case;
    config.kernel = dut::make_kernel(scoring::profile_for(use_case), latency_us, power);
    config.level_shifter_mw = shifter_mw;
    session.emplace(config);
    link.emplace(*session);
  }
  std::optional<dut::DutSession> session;
  std::optional<transport::InProcessLink> link;
};

runner::SessionConfig base_config(scoring::UseCase use_case,
                                  const std::filesystem::path& stimuli) {
  runner::SessionConfig config;
  config.benchmark = scoring::profile_for(use_case);
  config.stimuli_dir = stimuli;
  return config;
}

void write_ic_fixtures(const std::filesystem::path& dir, std::uint32_t count,
                       std::uint32_t correct, std::uint64_t seed = 1) {
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = count;
  spec.correct = correct;
  spec.seed = seed;
  fixture::generate_dataset(dir, spec);
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("loop sizing covers ten seconds and ten iterations") {
  CHECK(runner::size_loop(10, 10.0, 1000) == 10000);
  CHECK(runner::size_loop(10, 10.0, 100000) == 100);
  CHECK(runner::size_loop(10, 10.0, 999000) == 11);   // ceil(10/0.999)
  CHECK(runner::size_loop(10, 10.0, 2000000) == 10);  // the floor binds
  CHECK(runner::size_loop(10, 10.0, 1000000) == 10);
  CHECK_THROWS_AS(runner::size_loop(10, 10.0, 0), MeasurementError);
}

TEST_CASE("handshake reports the device name and is idempotent") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 2, 2);
  Rig rig(scoring::UseCase::kIc, 1000, {30, 5});
  CHECK(runner::handshake(*rig.link, Mode::kPerformance) == "rig-dut");
  CHECK(runner::handshake(*rig.link, Mode::kPerformance) == "rig-dut");
}

TEST_CASE("latency procedure sizes, times, and medians five runs") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 3, 3);

  struct Case {
    std::int64_t latency_us;
    std::uint64_t iterations;
    double ips;
  };
  for (const Case& c : {Case{100000, 100, 10.0}, Case{2000000, 10, 0.5},
                        Case{999000, 11, 1e6 / 999000.0}}) {
    CAPTURE(c.latency_us);
    Rig rig(scoring::UseCase::kIc, c.latency_us, {30, 5});
    runner::handshake(*rig.link, Mode::kPerformance);
    auto config = base_config(scoring::UseCase::kIc, stim.path());
    std::vector<runner::LatencyRunRaw> raw;
    auto score = runner::run_latency(*rig.link, config, raw);

    REQUIRE(raw.size() == 5);
    REQUIRE(score.per_run_ips.size() == 5);
    for (const auto& run : raw) {
      CHECK(run.iterations == c.iterations);
      CHECK(run.t_end_us - run.t_start_us ==
            static_cast<std::int64_t>(c.iterations) * c.latency_us);
    }
    for (double ips : score.per_run_ips)
      CHECK(std::abs(ips - c.ips) / c.ips < 1e-9);
    CHECK(std::abs(score.median_ips - c.ips) / c.ips < 1e-9);
    // Stimuli rotate round-robin over the sorted directory.
    CHECK(raw[0].stimulus == "stim_0000.bin");
    CHECK(raw[1].stimulus == "stim_0001.bin");
    CHECK(raw[3].stimulus == "stim_0000.bin");
  }
}

TEST_CASE("latency procedure needs stimuli") {
  testutil::TempDir stim("empty");
  Rig rig(scoring::UseCase::kIc, 1000, {30, 5});
  runner::handshake(*rig.link, Mode::kPerformance);
  auto config = base_config(scoring::UseCase::kIc, stim.path());
  std::vector<runner::LatencyRunRaw> raw;
  CHECK_THROWS_AS(runner::run_latency(*rig.link, config, raw), MeasurementError);
}

TEST_CASE("accuracy procedure scores Top-1 over the whole directory") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 200, 173);
  Rig rig(scoring::UseCase::kIc, 1000, {30, 5});
  runner::handshake(*rig.link, Mode::kPerformance);
  auto config = base_config(scoring::UseCase::kIc, stim.path());

  std::vector<runner::AccuracyRowRaw> rows;
  auto score = runner::run_accuracy(*rig.link, config, rows);
  CHECK(score.metric_kind == scoring::MetricKind::kTop1);
  CHECK(score.n_inputs == 200);
  CHECK(score.value == 0.865);
  CHECK(rows.size() == 200);

  // One set-tensor and one single-iteration inference per input.
  const std::string& transcript = rig.link->transcript();
  CHECK(count_occurrences(transcript, "set-tensor\n") == 200);
  CHECK(count_occurrences(transcript, "infer 1 0\n") == 200);
}

TEST_CASE("accuracy procedure scores AUC for anomaly detection") {
  testutil::TempDir stim("stim");
  // Separable: anomalous files all score 4x the normal base.
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kAd;
  spec.count = 12;
  spec.anomalous = 5;
  spec.seed = 9;
  fixture::generate_dataset(stim.path(), spec);

  Rig rig(scoring::UseCase::kAd, 1000, {30, 5});
  runner::handshake(*rig.link, Mode::kPerformance);
  auto config = base_config(scoring::UseCase::kAd, stim.path());
  std::vector<runner::AccuracyRowRaw> rows;
  auto score = runner::run_accuracy(*rig.link, config, rows);
  CHECK(score.metric_kind == scoring::MetricKind::kAuc);
  CHECK(score.value == 1.0);
  CHECK(score.n_inputs == 12);
}

TEST_CASE("energy procedure integrates the trigger-bracketed windows") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 4, 4);

  SUBCASE("constant power pins microjoules per inference") {
    // 30 mW during and between loops: 10 s windows of 200 inferences each.
    Rig rig(scoring::UseCase::kIc, 50000, {30.0, 30.0});
    runner::handshake(*rig.link, Mode::kEnergy);
    auto config = base_config(scoring::UseCase::kIc, stim.path());
    config.mode = Mode::kEnergy;
    std::vector<runner::LatencyRunRaw> raw;
    auto outcome = runner::run_energy(*rig.link, config, raw);

    REQUIRE(outcome.energy.uj_per_inference.size() == 5);
    for (std::size_t run = 0; run < 5; ++run) {
      CHECK(outcome.energy.inferences_in_window[run] == 200);
      CHECK(outcome.energy.window_joules[run] ==
            doctest::Approx(0.3).epsilon(0.005));
      CHECK(outcome.energy.uj_per_inference[run] ==
            doctest::Approx(1500.0).epsilon(0.005));
    }
    CHECK(outcome.energy.median_of_five_uj == doctest::Approx(1500.0).epsilon(0.005));
    CHECK(outcome.latency.median_ips == doctest::Approx(20.0).epsilon(1e-9));
    // Two trigger edges per run, and the probe never leaks into the window.
    CHECK(outcome.trace.triggers_s.size() == 10);
  }

  SUBCASE("idle/active two-level profile matches the analytic integral") {
    Rig rig(scoring::UseCase::kIc, 20000, {33.0, 6.0});
    runner::handshake(*rig.link, Mode::kEnergy);
    auto config = base_config(scoring::UseCase::kIc, stim.path());
    config.mode = Mode::kEnergy;
    std::vector<runner::LatencyRunRaw> raw;
    auto outcome = runner::run_energy(*rig.link, config, raw);
    for (std::size_t run = 0; run < 5; ++run) {
      double window_s =
          static_cast<double>(raw[run].t_end_us - raw[run].t_start_us) * 1e-6;
      double analytic = 33.0e-3 * window_s;  // fully active inside the window
      CHECK(outcome.energy.window_joules[run] ==
            doctest::Approx(analytic).epsilon(0.005));
    }
  }

  SUBCASE("level-shifter power never reaches the score") {
    auto run_with_shifter = [&](double shifter_mw) {
      Rig rig(scoring::UseCase::kIc, 40000, {25.0, 5.0}, shifter_mw);
      runner::handshake(*rig.link, Mode::kEnergy);
      auto config = base_config(scoring::UseCase::kIc, stim.path());
      config.mode = Mode::kEnergy;
      std::vector<runner::LatencyRunRaw> raw;
      return runner::run_energy(*rig.link, config, raw);
    };
    auto a = run_with_shifter(2.0);
    auto b = run_with_shifter(20.0);  // x10 framework overhead
    CHECK(a.energy.uj_per_inference == b.energy.uj_per_inference);
    CHECK(a.energy.window_joules == b.energy.window_joules);
    // The shifter channel itself did change.
    double sa = emon::integrate_joules(a.trace, emon::find_window(a.trace),
                                       emon::Channel::kLevelShifter);
    double sb = emon::integrate_joules(b.trace, emon::find_window(b.trace),
                                       emon::Channel::kLevelShifter);
    CHECK(sb > 5.0 * sa);
  }
}

TEST_CASE("energy-mode and performance-mode timing sources agree") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 3, 3);

  auto run_mode = [&](Mode mode) {
    Rig rig(scoring::UseCase::kIc, 77000, {30, 5});
    auto config = base_config(scoring::UseCase::kIc, stim.path());
    config.mode = mode;
    config.measure_accuracy = false;
    return runner::run_session(*rig.link, config, {});
  };
  auto perf = run_mode(Mode::kPerformance);
  auto energy = run_mode(Mode::kEnergy);
  REQUIRE(perf.report.latency);
  REQUIRE(energy.report.latency);
  double a = perf.report.latency->median_ips;
  double b = energy.report.latency->median_ips;
  CHECK(std::abs(a - b) / a < 1e-9);
}

TEST_CASE("sessions replay deterministically") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 5, 4);

  auto run_once = [&]() {
    Rig rig(scoring::UseCase::kIc, 30000, {30, 5});
    auto config = base_config(scoring::UseCase::kIc, stim.path());
    config.mode = Mode::kEnergy;
    auto result = runner::run_session(*rig.link, config, {});
    return std::pair{rig.link->transcript(), result};
  };
  auto [transcript1, result1] = run_once();
  auto [transcript2, result2] = run_once();
  CHECK(transcript1 == transcript2);
  CHECK(result1.report.latency->per_run_ips == result2.report.latency->per_run_ips);
  CHECK(result1.report.energy->uj_per_inference ==
        result2.report.energy->uj_per_inference);
  CHECK(result1.report.accuracy->value == result2.report.accuracy->value);
  CHECK(result1.report.measured_span_us == result2.report.measured_span_us);

  // Medians are medians of the runs actually executed.
  CHECK(result1.report.latency->median_ips ==
        scoring::median_of_five(result1.report.latency->per_run_ips));
  CHECK(result1.report.energy->median_of_five_uj ==
        scoring::median_of_five(result1.report.energy->uj_per_inference));
}

TEST_CASE("session report carries mode, name, and configuration") {
  testutil::TempDir stim("stim");
  write_ic_fixtures(stim.path(), 2, 2);
  Rig rig(scoring::UseCase::kIc, 45000, {30, 5});
  auto config = base_config(scoring::UseCase::kIc, stim.path());
  config.mode = Mode::kEnergy;
  rules::SubmissionMeta meta;
  meta.division = rules::Division::kClosed;
  meta.quantization = rules::QuantizationKind::kPtq;
  auto result = runner::run_session(*rig.link, config, meta);

  CHECK(result.report.benchmark_id == "ic");
  CHECK(result.report.dut_name == "rig-dut");
  CHECK(result.report.mode == Mode::kEnergy);
  CHECK(result.report.emon.has_value());
  CHECK(result.report.submission.quantization == rules::QuantizationKind::kPtq);
  REQUIRE(result.trace.has_value());
  CHECK(result.report.latency_runs.size() == 5);
  CHECK(result.report.measured_span_us == result.report.latency_runs.back().t_end_us);
}
