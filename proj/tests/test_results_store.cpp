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
#include "mcubench/results_store.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

#include "mcubench/dut_sim.hpp"
#include "mcubench/errors.hpp"
#include "mcubench/fixture.hpp"
#include "test_util.hpp"

using namespace mcubench;
using protocol::Mode;

namespace {

// Produces a full energy-mode session against the in-process simulator.
store::RawData run_energy_session(runner::RunReport& report_out,
                                  const std::filesystem::path& stimuli) {
  dut::DutConfig dut_config;
  dut_config.use_case = scoring::UseCase::kIc;
  dut_config.kernel = dut::make_kernel(scoring::profile_for(scoring::UseCase::kIc),
                                       35000, {28.0, 4.0});
  dut::DutSession session(dut_config);
  transport::InProcessLink link(session);

  runner::SessionConfig config;
  config.mode = Mode::kEnergy;
  config.benchmark = scoring::profile_for(scoring::UseCase::kIc);
  config.stimuli_dir = stimuli;
  rules::SubmissionMeta meta;
  meta.quantization = rules::QuantizationKind::kPtq;
  auto result = runner::run_session(link, config, meta);
  report_out = result.report;
  return store::RawData{std::move(result.accuracy_rows), std::move(result.trace)};
}

std::vector<std::string> folder_files(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("save/load reproduces the report and raw data") {
  testutil::TempDir stim("stim");
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = 6;
  spec.correct = 5;
  fixture::generate_dataset(stim.path(), spec);

  runner::RunReport report;
  store::RawData raw = run_energy_session(report, stim.path());
  testutil::TempDir dir("folder");
  store::save(report, raw, dir.path());

  CHECK(folder_files(dir.path()) ==
        std::vector<std::string>{"accuracy_outputs.csv", "latency_run_1.csv",
                                 "latency_run_2.csv", "latency_run_3.csv",
                                 "latency_run_4.csv", "latency_run_5.csv",
                                 "manifest.json", "trace.csv", "triggers.csv"});

  store::LoadedFolder loaded = store::load(dir.path());
  CHECK(loaded.report.benchmark_id == report.benchmark_id);
  CHECK(loaded.report.mode == report.mode);
  CHECK(loaded.report.dut_name == report.dut_name);
  CHECK(loaded.report.latency->per_run_ips == report.latency->per_run_ips);
  CHECK(loaded.report.latency->median_ips == report.latency->median_ips);
  CHECK(loaded.report.accuracy->value == report.accuracy->value);
  CHECK(loaded.report.accuracy->n_inputs == report.accuracy->n_inputs);
  CHECK(loaded.report.energy->uj_per_inference == report.energy->uj_per_inference);
  CHECK(loaded.report.energy->median_of_five_uj == report.energy->median_of_five_uj);
  CHECK(loaded.report.submission.quantization == rules::QuantizationKind::kPtq);
  REQUIRE(loaded.report.latency_runs.size() == report.latency_runs.size());
  for (std::size_t i = 0; i < report.latency_runs.size(); ++i) {
    CHECK(loaded.report.latency_runs[i].stimulus == report.latency_runs[i].stimulus);
    CHECK(loaded.report.latency_runs[i].iterations == report.latency_runs[i].iterations);
    CHECK(loaded.report.latency_runs[i].t_start_us == report.latency_runs[i].t_start_us);
    CHECK(loaded.report.latency_runs[i].t_end_us == report.latency_runs[i].t_end_us);
  }
  REQUIRE(loaded.raw.accuracy_rows.size() == raw.accuracy_rows.size());
  for (std::size_t i = 0; i < raw.accuracy_rows.size(); ++i) {
    CHECK(loaded.raw.accuracy_rows[i].stimulus == raw.accuracy_rows[i].stimulus);
    CHECK(loaded.raw.accuracy_rows[i].label == raw.accuracy_rows[i].label);
    CHECK(loaded.raw.accuracy_rows[i].outputs == raw.accuracy_rows[i].outputs);
  }
  REQUIRE(loaded.raw.trace.has_value());
  CHECK(loaded.raw.trace->triggers_s == raw.trace->triggers_s);
  CHECK(loaded.raw.trace->samples.size() == raw.trace->samples.size());
}

TEST_CASE("saving twice is byte-identical") {
  testutil::TempDir stim("stim");
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = 3;
  spec.correct = 3;
  fixture::generate_dataset(stim.path(), spec);

  runner::RunReport report;
  store::RawData raw = run_energy_session(report, stim.path());
  testutil::TempDir a("folder");
  testutil::TempDir b("folder");
  store::save(report, raw, a.path());
  store::save(report, raw, b.path());

  auto names = folder_files(a.path());
  CHECK(names == folder_files(b.path()));
  for (const auto& name : names) {
    CAPTURE(name);
    CHECK(testutil::slurp(a / name) == testutil::slurp(b / name));
  }
}

TEST_CASE("rescore reproduces every manifest score bit for bit") {
  testutil::TempDir stim("stim");
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = 5;
  spec.correct = 4;
  fixture::generate_dataset(stim.path(), spec);

  runner::RunReport report;
  store::RawData raw = run_energy_session(report, stim.path());
  testutil::TempDir dir("folder");
  store::save(report, raw, dir.path());

  runner::RunReport rescored = store::rescore(dir.path());
  store::LoadedFolder loaded = store::load(dir.path());
  CHECK(store::diff_scores(loaded.report, rescored).empty());
  CHECK(store::diff_scores(report, rescored).empty());
}

TEST_CASE("hand-edited manifest scores are detected") {
  testutil::TempDir stim("stim");
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = 3;
  spec.correct = 3;
  fixture::generate_dataset(stim.path(), spec);

  runner::RunReport report;
  store::RawData raw = run_energy_session(report, stim.path());
  testutil::TempDir dir("folder");
  store::save(report, raw, dir.path());

  // Nudge the median in the stored manifest.
  std::string manifest = testutil::slurp(dir / "manifest.json");
  std::string needle = "\"median_ips\":";
  auto pos = manifest.find(needle);
  REQUIRE(pos != std::string::npos);
  manifest.insert(pos + needle.size(), " 999.0,\"x\":");
  {
    std::ofstream out(dir / "manifest.json", std::ios::trunc | std::ios::binary);
    out << manifest;
  }

  runner::RunReport rescored = store::rescore(dir.path());
  store::LoadedFolder loaded = store::load(dir.path());
  auto diffs = store::diff_scores(loaded.report, rescored);
  REQUIRE(!diffs.empty());
  CHECK(diffs.front() == "median IPS differs");
}

TEST_CASE("load failure modes") {
  testutil::TempDir dir("folder");
  SUBCASE("missing manifest") {
    CHECK_THROWS_WITH_AS(store::load(dir.path()),
                         doctest::Contains("missing manifest"), StoreError);
  }
  SUBCASE("schema mismatch") {
    std::ofstream out(dir / "manifest.json");
    out << "{\"schema_version\": 99}";
    out.close();
    CHECK_THROWS_WITH_AS(store::load(dir.path()), doctest::Contains("schema"),
                         StoreError);
  }
  SUBCASE("corrupt manifest json") {
    std::ofstream out(dir / "manifest.json");
    out << "{not json";
    out.close();
    CHECK_THROWS_WITH_AS(store::load(dir.path()), doctest::Contains("corrupt"),
                         StoreError);
  }
}

TEST_CASE("truncated trace files fail the load") {
  testutil::TempDir stim("stim");
  fixture::DatasetSpec spec;
  spec.use_case = scoring::UseCase::kIc;
  spec.count = 2;
  spec.correct = 2;
  fixture::generate_dataset(stim.path(), spec);

  runner::RunReport report;
  store::RawData raw = run_energy_session(report, stim.path());
  testutil::TempDir dir("folder");
  store::save(report, raw, dir.path());

  std::string text = testutil::slurp(dir / "trace.csv");
  std::ofstream out(dir / "trace.csv", std::ios::trunc | std::ios::binary);
  out << text.substr(0, text.size() * 2 / 3);
  out.close();
  CHECK_THROWS_AS(store::load(dir.path()), StoreError);
}

TEST_CASE("unwritable destinations raise IO errors") {
  testutil::TempDir dir("folder");
  std::ofstream block(dir / "not_a_dir");
  block << "file";
  block.close();

  runner::RunReport report;
  report.benchmark_id = "ic";
  CHECK_THROWS_AS(store::save(report, {}, dir.path() / "not_a_dir" / "sub"),
                  StoreError);
}

TEST_CASE("random report and raw payloads round-trip through the folder") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    runner::RunReport report;
    report.benchmark_id = "kws";
    report.mode = Mode::kPerformance;
    report.dut_name = "fuzz-dut";
    scoring::LatencyScore latency;
    for (int k = 0; k < 5; ++k) {
      std::int64_t t0 = std::uniform_int_distribution<std::int64_t>(0, 1 << 30)(rng);
      std::int64_t span = std::uniform_int_distribution<std::int64_t>(1, 1 << 24)(rng);
      std::uint64_t iters = std::uniform_int_distribution<std::uint64_t>(1, 100000)(rng);
      report.latency_runs.push_back({"s.bin", iters, t0, t0 + span});
      latency.per_run_ips.push_back(static_cast<double>(iters) * 1e6 /
                                    static_cast<double>(span));
    }
    latency.median_ips = scoring::median_of_five(latency.per_run_ips);
    report.latency = latency;

    store::RawData raw;
    scoring::AccuracyScore accuracy;
    accuracy.metric_kind = scoring::MetricKind::kTop1;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<std::vector<double>> outputs;
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
      runner::AccuracyRowRaw row;
      row.stimulus = "s" + std::to_string(i) + ".bin";
      row.label = static_cast<float>(i % 12);
      for (int k = 0; k < 12; ++k) row.outputs.push_back(val(rng));
      outputs.push_back(row.outputs);
      labels.push_back(static_cast<std::uint32_t>(row.label));
      raw.accuracy_rows.push_back(std::move(row));
    }
    accuracy.n_inputs = n;
    accuracy.value = scoring::top1(outputs, labels);
    report.accuracy = accuracy;

    testutil::TempDir dir("fuzz");
    store::save(report, raw, dir.path());
    runner::RunReport rescored = store::rescore(dir.path());
    CHECK(store::diff_scores(store::load(dir.path()).report, rescored).empty());
  }
}
