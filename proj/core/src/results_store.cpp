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

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "mcubench/errors.hpp"
#include "mcubench/numfmt.hpp"
#include "mcubench/version.hpp"

namespace mcubench::store {
namespace {

using nlohmann::json;

std::string latency_run_name(std::size_t k) {
  return "latency_run_" + std::to_string(k + 1) + ".csv";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw StoreError("short write: " + path.string());
}

std::string read_text(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError(std::string(what) + " missing: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

json scores_json(const runner::RunReport& report) {
  json scores = json::object();
  if (report.latency) {
    scores["latency"] = {{"per_run_ips", report.latency->per_run_ips},
                         {"median_ips", report.latency->median_ips}};
  }
  if (report.accuracy) {
    scores["accuracy"] = {
        {"metric", std::string(scoring::metric_kind_name(report.accuracy->metric_kind))},
        {"value", report.accuracy->value},
        {"n_inputs", report.accuracy->n_inputs}};
  }
  if (report.energy) {
    scores["energy"] = {
        {"window_joules", report.energy->window_joules},
        {"inferences_in_window", report.energy->inferences_in_window},
        {"uj_per_inference", report.energy->uj_per_inference},
        {"median_uj_per_inference", report.energy->median_of_five_uj}};
  }
  return scores;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void save(const runner::RunReport& report, const RawData& raw,
          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir))
    throw StoreError("cannot create results folder: " + dir.string());

  json manifest;
  manifest["schema_version"] = kResultsSchemaVersion;
  manifest["tool_version"] = kToolVersion;
  manifest["benchmark"] = report.benchmark_id;
  manifest["mode"] =
      report.mode == protocol::Mode::kEnergy ? "energy" : "performance";
  manifest["dut_name"] = report.dut_name;
  manifest["measured_span_us"] = report.measured_span_us;
  manifest["session"] = {{"n_runs", report.n_runs},
                         {"min_run_seconds", report.min_run_seconds},
                         {"min_iterations", report.min_iterations},
                         {"max_chunk", report.max_chunk}};
  if (report.emon) {
    manifest["session"]["sample_rate_hz"] = report.emon->sample_rate_hz;
    manifest["session"]["supply_voltage_v"] = report.emon->supply_voltage_v;
  }
  manifest["scores"] = scores_json(report);
  json mods = json::array();
  for (rules::Component c : report.submission.modified_components)
    mods.push_back(std::string(rules::component_name(c)));
  manifest["submission"] = {
      {"division", std::string(rules::division_name(report.submission.division))},
      {"modified_components", mods},
      {"quantization", std::string(rules::quantization_name(report.submission.quantization))},
      {"deviations_doc", report.submission.deviations_doc}};

  write_text(dir / kManifestName, manifest.dump(2) + "\n");

  for (std::size_t k = 0; k < report.latency_runs.size(); ++k) {
    const auto& run = report.latency_runs[k];
    std::string csv = "run,stimulus,iterations,t_start_us,t_end_us\n";
    csv += std::to_string(k + 1) + ',' + run.stimulus + ',' +
           std::to_string(run.iterations) + ',' + std::to_string(run.t_start_us) +
           ',' + std::to_string(run.t_end_us) + '\n';
    write_text(dir / latency_run_name(k), csv);
  }

  if (!raw.accuracy_rows.empty()) {
    std::string csv = "stimulus,label,central_begin,central_end,outputs\n";
    for (const auto& row : raw.accuracy_rows) {
      csv += row.stimulus + ',' + numfmt::format_double(row.label) + ',' +
             std::to_string(row.central_begin) + ',' +
             std::to_string(row.central_end) + ',';
      for (std::size_t i = 0; i < row.outputs.size(); ++i) {
        if (i) csv += ';';
        csv += numfmt::format_double(row.outputs[i]);
      }
      csv += '\n';
    }
    write_text(dir / kAccuracyName, csv);
  }

  if (raw.trace) {
    emon::write_trace_csv(dir / kTraceName, *raw.trace);
    emon::write_triggers_csv(dir / kTriggersName, *raw.trace);
  }
}

LoadedFolder load(const std::filesystem::path& dir) {
  std::filesystem::path manifest_path = dir / kManifestName;
  if (!std::filesystem::exists(manifest_path))
    throw StoreError("missing manifest: " + manifest_path.string());

  json manifest;
  try {
    manifest = json::parse(read_text(manifest_path, "manifest"));
  } catch (const json::exception& e) {
    throw StoreError("corrupt manifest: " + std::string(e.what()));
  }

  LoadedFolder folder;
  runner::RunReport& report = folder.report;
  try {
    if (manifest.at("schema_version").get<int>() != kResultsSchemaVersion)
      throw StoreError("schema mismatch: folder written by schema " +
                       manifest.at("schema_version").dump() + ", tool expects " +
                       std::to_string(kResultsSchemaVersion));
    report.benchmark_id = manifest.at("benchmark").get<std::string>();
    report.mode = manifest.at("mode").get<std::string>() == "energy"
                      ? protocol::Mode::kEnergy
                      : protocol::Mode::kPerformance;
    report.dut_name = manifest.at("dut_name").get<std::string>();
    report.measured_span_us = manifest.at("measured_span_us").get<std::int64_t>();
    const json& session = manifest.at("session");
    report.n_runs = session.at("n_runs").get<std::uint32_t>();
    report.min_run_seconds = session.at("min_run_seconds").get<double>();
    report.min_iterations = session.at("min_iterations").get<std::uint64_t>();
    report.max_chunk = session.at("max_chunk").get<std::size_t>();
    if (session.contains("sample_rate_hz")) {
      runner::EmonConfig emon;
      emon.sample_rate_hz = session.at("sample_rate_hz").get<double>();
      emon.supply_voltage_v = session.at("supply_voltage_v").get<double>();
      report.emon = emon;
    }

    const json& scores = manifest.at("scores");
    if (scores.contains("latency")) {
      scoring::LatencyScore latency;
      latency.per_run_ips =
          scores.at("latency").at("per_run_ips").get<std::vector<double>>();
      latency.median_ips = scores.at("latency").at("median_ips").get<double>();
      report.latency = std::move(latency);
    }
    if (scores.contains("accuracy")) {
      scoring::AccuracyScore accuracy;
      accuracy.metric_kind =
          scores.at("accuracy").at("metric").get<std::string>() == "auc"
              ? scoring::MetricKind::kAuc
              : scoring::MetricKind::kTop1;
      accuracy.value = scores.at("accuracy").at("value").get<double>();
      accuracy.n_inputs = scores.at("accuracy").at("n_inputs").get<std::uint64_t>();
      report.accuracy = accuracy;
    }
    if (scores.contains("energy")) {
      scoring::EnergyScore energy;
      const json& e = scores.at("energy");
      energy.window_joules = e.at("window_joules").get<std::vector<double>>();
      energy.inferences_in_window =
          e.at("inferences_in_window").get<std::vector<std::uint64_t>>();
      energy.uj_per_inference = e.at("uj_per_inference").get<std::vector<double>>();
      energy.median_of_five_uj = e.at("median_uj_per_inference").get<double>();
      report.energy = std::move(energy);
    }

    const json& submission = manifest.at("submission");
    auto division = rules::parse_division(submission.at("division").get<std::string>());
    auto quantization =
        rules::parse_quantization(submission.at("quantization").get<std::string>());
    if (!division || !quantization)
      throw StoreError("corrupt manifest: bad submission metadata");
    report.submission.division = *division;
    report.submission.quantization = *quantization;
    report.submission.deviations_doc =
        submission.at("deviations_doc").get<std::string>();
    for (const auto& name : submission.at("modified_components")) {
      auto component = rules::parse_component(name.get<std::string>());
      if (!component) throw StoreError("corrupt manifest: unknown component");
      report.submission.modified_components.insert(*component);
    }
  } catch (const json::exception& e) {
    throw StoreError("corrupt manifest: " + std::string(e.what()));
  }

  // Raw latency marks, one file per run.
  if (report.latency) {
    for (std::uint32_t k = 0; k < report.n_runs; ++k) {
      std::string text = read_text(dir / latency_run_name(k), "latency run file");
      std::size_t nl = text.find('\n');
      if (nl == std::string::npos || text.substr(0, nl) !=
                                         "run,stimulus,iterations,t_start_us,t_end_us")
        throw StoreError("corrupt latency run file: bad header");
      std::string_view row(text);
      row.remove_prefix(nl + 1);
      if (row.ends_with('\n')) row.remove_suffix(1);
      auto cols = split(row, ',');
      runner::LatencyRunRaw raw;
      std::uint64_t run_no = 0;
      if (cols.size() != 5 || !numfmt::parse_u64(cols[0], run_no) ||
          !numfmt::parse_u64(cols[2], raw.iterations) ||
          !numfmt::parse_i64(cols[3], raw.t_start_us) ||
          !numfmt::parse_i64(cols[4], raw.t_end_us) || run_no != k + 1)
        throw StoreError("corrupt latency run file: bad row");
      raw.stimulus = std::string(cols[1]);
      report.latency_runs.push_back(std::move(raw));
    }
  }

  if (report.accuracy) {
    std::string text = read_text(dir / kAccuracyName, "accuracy outputs");
    std::size_t nl = text.find('\n');
    if (nl == std::string::npos ||
        text.substr(0, nl) != "stimulus,label,central_begin,central_end,outputs")
      throw StoreError("corrupt accuracy outputs: bad header");
    std::string_view rest(text);
    rest.remove_prefix(nl + 1);
    while (!rest.empty()) {
      std::size_t eol = rest.find('\n');
      std::string_view row = eol == std::string_view::npos ? rest : rest.substr(0, eol);
      rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
      if (row.empty()) continue;
      auto cols = split(row, ',');
      runner::AccuracyRowRaw raw;
      double label = 0.0;
      std::uint64_t begin = 0, end = 0;
      if (cols.size() != 5 || !numfmt::parse_double(cols[1], label) ||
          !numfmt::parse_u64(cols[2], begin) || !numfmt::parse_u64(cols[3], end))
        throw StoreError("corrupt accuracy outputs: bad row");
      raw.stimulus = std::string(cols[0]);
      raw.label = static_cast<float>(label);
      raw.central_begin = static_cast<std::uint32_t>(begin);
      raw.central_end = static_cast<std::uint32_t>(end);
      for (std::string_view tok : split(cols[4], ';')) {
        double v = 0.0;
        if (!numfmt::parse_double(tok, v))
          throw StoreError("corrupt accuracy outputs: bad output value");
        raw.outputs.push_back(v);
      }
      folder.raw.accuracy_rows.push_back(std::move(raw));
    }
    if (folder.raw.accuracy_rows.size() != report.accuracy->n_inputs)
      throw StoreError("corrupt accuracy outputs: row count disagrees with manifest");
  }

  if (report.energy) {
    folder.raw.trace = emon::read_trace_csv(dir / kTraceName, dir / kTriggersName);
  }
  return folder;
}

runner::RunReport rescore(const std::filesystem::path& dir) {
  LoadedFolder folder = load(dir);
  runner::RunReport report = folder.report;
  const scoring::BenchmarkProfile* profile =
      scoring::find_profile(report.benchmark_id);
  if (!profile) throw StoreError("unknown benchmark id: " + report.benchmark_id);

  if (report.latency) {
    scoring::LatencyScore latency;
    for (const auto& run : report.latency_runs) {
      std::int64_t elapsed = run.t_end_us - run.t_start_us;
      if (elapsed <= 0) throw StoreError("corrupt latency run: non-positive span");
      latency.per_run_ips.push_back(static_cast<double>(run.iterations) * 1e6 /
                                    static_cast<double>(elapsed));
    }
    latency.median_ips = scoring::median_of_runs(latency.per_run_ips);
    report.latency = std::move(latency);
  }

  if (report.accuracy) {
    scoring::AccuracyScore accuracy;
    accuracy.metric_kind = profile->metric_kind;
    accuracy.n_inputs = folder.raw.accuracy_rows.size();
    if (profile->metric_kind == scoring::MetricKind::kTop1) {
      std::vector<std::vector<double>> outputs;
      std::vector<std::uint32_t> labels;
      for (const auto& row : folder.raw.accuracy_rows) {
        outputs.push_back(row.outputs);
        labels.push_back(static_cast<std::uint32_t>(row.label));
      }
      accuracy.value = scoring::top1(outputs, labels);
    } else {
      std::vector<double> file_scores;
      std::vector<bool> anomalous;
      for (const auto& row : folder.raw.accuracy_rows) {
        file_scores.push_back(scoring::anomaly_file_score(
            row.outputs, row.central_begin, row.central_end));
        anomalous.push_back(row.label != 0.0f);
      }
      accuracy.value = scoring::auc_roc(file_scores, anomalous);
    }
    report.accuracy = accuracy;
  }

  if (report.energy) {
    if (!folder.raw.trace) throw StoreError("energy score without a stored trace");
    const emon::EnergyTrace& trace = *folder.raw.trace;
    if (trace.triggers_s.size() != 2 * report.latency_runs.size())
      throw StoreError("corrupt triggers: expected one pair per run");
    scoring::EnergyScore energy;
    for (std::size_t run = 0; run < report.latency_runs.size(); ++run) {
      emon::Window window{trace.triggers_s[2 * run], trace.triggers_s[2 * run + 1]};
      double joules = emon::integrate_joules(trace, window, emon::Channel::kDut);
      std::uint64_t inferences = report.latency_runs[run].iterations;
      energy.window_joules.push_back(joules);
      energy.inferences_in_window.push_back(inferences);
      energy.uj_per_inference.push_back(
          scoring::energy_per_inference_uj(joules, inferences));
    }
    energy.median_of_five_uj = scoring::median_of_runs(energy.uj_per_inference);
    report.energy = std::move(energy);
  }
  return report;
}

std::vector<std::string> diff_scores(const runner::RunReport& manifest,
                                     const runner::RunReport& rescored) {
  std::vector<std::string> diffs;
  auto check = [&diffs](bool ok, const std::string& what) {
    if (!ok) diffs.push_back(what);
  };

  check(manifest.latency.has_value() == rescored.latency.has_value(),
        "latency score presence differs");
  if (manifest.latency && rescored.latency) {
    check(manifest.latency->per_run_ips == rescored.latency->per_run_ips,
          "per-run IPS differ");
    check(manifest.latency->median_ips == rescored.latency->median_ips,
          "median IPS differs");
  }
  check(manifest.accuracy.has_value() == rescored.accuracy.has_value(),
        "accuracy score presence differs");
  if (manifest.accuracy && rescored.accuracy) {
    check(manifest.accuracy->value == rescored.accuracy->value,
          "accuracy value differs");
    check(manifest.accuracy->n_inputs == rescored.accuracy->n_inputs,
          "accuracy input count differs");
  }
  check(manifest.energy.has_value() == rescored.energy.has_value(),
        "energy score presence differs");
  if (manifest.energy && rescored.energy) {
    check(manifest.energy->window_joules == rescored.energy->window_joules,
          "window joules differ");
    check(manifest.energy->inferences_in_window ==
              rescored.energy->inferences_in_window,
          "window inference counts differ");
    check(manifest.energy->uj_per_inference == rescored.energy->uj_per_inference,
          "per-run energy scores differ");
    check(manifest.energy->median_of_five_uj == rescored.energy->median_of_five_uj,
          "median energy score differs");
  }
  return diffs;
}

}  // namespace mcubench::store
