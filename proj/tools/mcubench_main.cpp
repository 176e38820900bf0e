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
/// \file
/// \brief Host-side benchmark tool: drives the measurement procedures against
/// a simulated DUT, stores and re-scores results, validates submissions, and
/// exports energy traces.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcubench/dut_sim.hpp"
#include "mcubench/errors.hpp"
#include "mcubench/fixture.hpp"
#include "mcubench/numfmt.hpp"
#include "mcubench/results_store.hpp"
#include "mcubench/rules.hpp"
#include "mcubench/runner.hpp"
#include "mcubench/scoring.hpp"
#include "mcubench/transport.hpp"
#include "mcubench/version.hpp"

namespace {

namespace mb = mcubench;

struct KernelFlags {
  std::string benchmark = "ic";
  std::string dut_name = "sim-dut";
  std::int64_t latency_us = 100000;
  double active_mw = 30.0;
  double idle_mw = 5.0;
  double shifter_mw = 10.0;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
  cmd->add_option("--benchmark", flags.benchmark, "Benchmark id: kws|vww|ic|ad")
      ->required()
      ->check(CLI::IsMember({"kws", "vww", "ic", "ad"}));
  cmd->add_option("--dut-name", flags.dut_name, "Device id reported at handshake");
  cmd->add_option("--latency-us", flags.latency_us,
                  "Simulated per-inference latency (virtual microseconds)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--active-mw", flags.active_mw, "DUT power while inferring")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--idle-mw", flags.idle_mw, "DUT power while idle")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--shifter-mw", flags.shifter_mw, "Level-shifter power")
      ->check(CLI::NonNegativeNumber);
}

mb::dut::DutConfig make_dut_config(const KernelFlags& flags) {
  const auto* profile = mb::scoring::find_profile(flags.benchmark);
  if (!profile) throw mb::ContractError("unknown benchmark: " + flags.benchmark);
  mb::dut::DutConfig config;
  config.name = flags.dut_name;
  config.use_case = profile->use_case;
  config.kernel = mb::dut::make_kernel(*profile, flags.latency_us,
                                       {flags.active_mw, flags.idle_mw});
  config.level_shifter_mw = flags.shifter_mw;
  return config;
}

std::string self_exe_path() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw mb::ProtocolError("cannot resolve own executable path");
  buf[n] = '\0';
  return std::string(buf);
}

void print_report(const mb::runner::RunReport& report) {
  std::cout << "benchmark:      " << report.benchmark_id << "\n"
            << "mode:           "
            << (report.mode == mb::protocol::Mode::kEnergy ? "energy"
                                                           : "performance")
            << "\n"
            << "dut:            " << report.dut_name << "\n";
  if (report.latency) {
    std::cout << "ips:           ";
    for (double v : report.latency->per_run_ips)
      std::cout << ' ' << mb::numfmt::format_double(v);
    std::cout << "\nmedian ips:     "
              << mb::numfmt::format_double(report.latency->median_ips) << "\n";
  }
  if (report.energy) {
    std::cout << "uJ/inf:        ";
    for (double v : report.energy->uj_per_inference)
      std::cout << ' ' << mb::numfmt::format_double(v);
    std::cout << "\nmedian uJ/inf:  "
              << mb::numfmt::format_double(report.energy->median_of_five_uj)
              << "\n";
  }
  if (report.accuracy) {
    std::cout << "accuracy:       "
              << mb::numfmt::format_double(report.accuracy->value) << " ("
              << mb::scoring::metric_kind_name(report.accuracy->metric_kind)
              << " over " << report.accuracy->n_inputs << " inputs)\n";
  }
}

int cmd_run(const KernelFlags& kernel_flags, const std::string& mode,
            std::string stimuli, const std::string& out_dir,
            const std::string& dut_kind, std::uint32_t runs, double min_seconds,
            std::uint64_t min_iterations, std::size_t max_chunk,
            double emon_rate, double emon_voltage, bool no_performance,
            bool no_accuracy, const std::string& division,
            const std::vector<std::string>& modified,
            const std::string& quantization, const std::string& deviations_doc) {
  const auto* profile = mb::scoring::find_profile(kernel_flags.benchmark);
  if (!profile)
    throw mb::ContractError("unknown benchmark: " + kernel_flags.benchmark);

  if (stimuli.empty()) {
    const char* root = std::getenv("MCUBENCH_STIMULI_ROOT");
    if (!root)
      throw mb::ContractError(
          "no --stimuli given and MCUBENCH_STIMULI_ROOT is not set");
    stimuli = std::string(root) + "/" + kernel_flags.benchmark;
  }

  mb::runner::SessionConfig config;
  config.mode = mode == "energy" ? mb::protocol::Mode::kEnergy
                                 : mb::protocol::Mode::kPerformance;
  config.stimuli_dir = stimuli;
  config.benchmark = *profile;
  config.emon = {emon_rate, emon_voltage};
  config.min_run_seconds = min_seconds;
  config.min_iterations = min_iterations;
  config.n_runs = runs;
  config.max_chunk = max_chunk;
  config.measure_performance = !no_performance;
  config.measure_accuracy = !no_accuracy;

  mb::rules::SubmissionMeta meta;
  auto parsed_division = mb::rules::parse_division(division);
  auto parsed_quant = mb::rules::parse_quantization(quantization);
  if (!parsed_division) throw mb::ContractError("bad --division: " + division);
  if (!parsed_quant) throw mb::ContractError("bad --quantization: " + quantization);
  meta.division = *parsed_division;
  meta.quantization = *parsed_quant;
  meta.deviations_doc = deviations_doc;
  for (const auto& name : modified) {
    auto component = mb::rules::parse_component(name);
    if (!component) throw mb::ContractError("unknown component: " + name);
    meta.modified_components.insert(*component);
  }

  mb::runner::SessionResult result;
  if (dut_kind == "subprocess") {
    std::filesystem::path tap =
        std::filesystem::temp_directory_path() /
        ("mcubench_tap_" + std::to_string(::getpid()) + ".log");
    std::vector<std::string> argv = {
        self_exe_path(),
        "sim-dut",
        "--benchmark", kernel_flags.benchmark,
        "--dut-name", kernel_flags.dut_name,
        "--latency-us", std::to_string(kernel_flags.latency_us),
        "--active-mw", mb::numfmt::format_double(kernel_flags.active_mw),
        "--idle-mw", mb::numfmt::format_double(kernel_flags.idle_mw),
        "--shifter-mw", mb::numfmt::format_double(kernel_flags.shifter_mw),
        "--emon-tap", tap.string()};
    mb::transport::SubprocessLink link({argv, tap});
    result = mb::runner::run_session(link, config, meta);
    link.close_and_wait();
    std::filesystem::remove(tap);
  } else {
    mb::dut::DutSession session(make_dut_config(kernel_flags));
    mb::transport::InProcessLink link(session);
    result = mb::runner::run_session(link, config, meta);
  }

  mb::store::RawData raw{std::move(result.accuracy_rows), std::move(result.trace)};
  mb::store::save(result.report, raw, out_dir);
  print_report(result.report);
  std::cout << "results written to " << out_dir << "\n";
  return 0;
}

int cmd_score(const std::string& dir, bool verify) {
  mb::runner::RunReport rescored = mb::store::rescore(dir);
  print_report(rescored);
  if (verify) {
    mb::store::LoadedFolder folder = mb::store::load(dir);
    auto diffs = mb::store::diff_scores(folder.report, rescored);
    if (!diffs.empty()) {
      for (const auto& d : diffs) std::cerr << "rescore mismatch: " << d << "\n";
      return 1;
    }
    std::cout << "manifest scores match the raw data\n";
  }
  return 0;
}

int cmd_validate(const std::string& dir) {
  mb::store::LoadedFolder folder = mb::store::load(dir);
  const auto* profile = mb::scoring::find_profile(folder.report.benchmark_id);
  if (!profile)
    throw mb::StoreError("unknown benchmark id: " + folder.report.benchmark_id);

  std::vector<mb::rules::Finding> findings = mb::rules::validate_submission(
      folder.report, folder.report.submission, *profile);

  // Stored scores must be re-derivable from the raw data.
  mb::runner::RunReport rescored = mb::store::rescore(dir);
  for (const auto& diff : mb::store::diff_scores(folder.report, rescored)) {
    findings.push_back({"store.rescore", mb::rules::Severity::kError,
                        "manifest does not match raw data: " + diff});
  }

  for (const auto& f : findings) {
    const char* severity = f.severity == mb::rules::Severity::kError     ? "ERROR"
                           : f.severity == mb::rules::Severity::kWarning ? "WARN"
                                                                         : "INFO";
    std::cout << severity << " [" << f.rule_id << "] " << f.message << "\n";
  }
  if (mb::rules::has_errors(findings)) {
    std::cout << "submission INVALID (" << findings.size() << " finding(s))\n";
    return 1;
  }
  std::cout << "submission valid ("
            << (findings.empty() ? "no findings"
                                 : std::to_string(findings.size()) + " annotation(s)")
            << ")\n";
  return 0;
}

int cmd_view_trace(const std::string& dir, const std::string& channel_name,
                   const std::string& out_file) {
  mb::emon::EnergyTrace trace = mb::emon::read_trace_csv(
      std::filesystem::path(dir) / mb::store::kTraceName,
      std::filesystem::path(dir) / mb::store::kTriggersName);
  mb::emon::Channel channel = channel_name == "level_shifter"
                                  ? mb::emon::Channel::kLevelShifter
                                  : mb::emon::Channel::kDut;

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_file.empty()) {
    file.open(out_file, std::ios::trunc);
    if (!file) throw mb::StoreError("cannot open " + out_file);
    out = &file;
  }
  *out << "t,mw\n";
  for (const auto& s : trace.samples) {
    if (s.channel != channel) continue;
    *out << mb::numfmt::format_double(s.t_s) << ','
         << mb::numfmt::format_double(s.voltage_v * s.current_a * 1e3) << '\n';
  }
  return 0;
}

int cmd_sim_dut(const KernelFlags& flags, const std::string& tap_path) {
  mb::dut::DutSession session(make_dut_config(flags));
  std::ofstream tap;
  if (!tap_path.empty()) {
    tap.open(tap_path, std::ios::trunc);
    if (!tap) throw mb::StoreError("cannot open tap file: " + tap_path);
  }
  return mb::dut::serve_stream(std::cin, std::cout, session,
                               tap_path.empty() ? nullptr : &tap);
}

int cmd_gen_fixtures(const std::string& benchmark, const std::string& out_dir,
                     std::uint32_t count, std::optional<std::uint32_t> correct,
                     std::optional<std::uint32_t> anomalous, std::uint64_t seed) {
  const auto* profile = mb::scoring::find_profile(benchmark);
  if (!profile) throw mb::ContractError("unknown benchmark: " + benchmark);
  mb::fixture::DatasetSpec spec;
  spec.use_case = profile->use_case;
  spec.count = count;
  spec.correct = correct.value_or(count);
  spec.anomalous = anomalous.value_or(count / 2);
  spec.seed = seed;
  if (spec.correct > count || spec.anomalous > count)
    throw mb::ContractError("--correct/--anomalous cannot exceed --count");
  mb::fixture::generate_dataset(out_dir, spec);
  std::cout << "wrote " << count << " " << benchmark << " fixtures to "
            << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for MCU-class inference devices"};
  app.set_version_flag("--version", mb::kToolVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a measurement session and store results");
  KernelFlags run_kernel;
  std::string run_mode = "performance";
  std::string run_stimuli;
  std::string run_out;
  std::string run_dut = "inproc";
  std::uint32_t run_runs = 5;
  double run_min_seconds = 10.0;
  std::uint64_t run_min_iterations = 10;
  std::size_t run_max_chunk = mb::protocol::kDefaultMaxChunk;
  double run_emon_rate = 1000.0;
  double run_emon_voltage = 3.0;
  bool run_no_performance = false;
  bool run_no_accuracy = false;
  std::string run_division = "closed";
  std::vector<std::string> run_modified;
  std::string run_quantization = "none";
  std::string run_deviations;
  add_kernel_flags(run, run_kernel);
  run->add_option("--mode", run_mode, "Measurement configuration")
      ->check(CLI::IsMember({"performance", "energy"}));
  run->add_option("--stimuli", run_stimuli,
                  "Stimuli directory (default: $MCUBENCH_STIMULI_ROOT/<benchmark>)");
  run->add_option("--out", run_out, "Results folder")->required();
  run->add_option("--dut", run_dut, "DUT transport")
      ->check(CLI::IsMember({"inproc", "subprocess"}));
  run->add_option("--runs", run_runs, "Measured runs (official: 5)")
      ->check(CLI::PositiveNumber);
  run->add_option("--min-seconds", run_min_seconds, "Minimum loop seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--min-iterations", run_min_iterations, "Minimum loop iterations")
      ->check(CLI::PositiveNumber);
  run->add_option("--max-chunk", run_max_chunk, "Download chunk size (bytes)")
      ->check(CLI::PositiveNumber);
  run->add_option("--emon-rate", run_emon_rate, "Energy monitor sample rate (Hz)")
      ->check(CLI::PositiveNumber);
  run->add_option("--emon-voltage", run_emon_voltage, "Supply voltage (V)")
      ->check(CLI::PositiveNumber);
  run->add_flag("--no-performance", run_no_performance,
                "Skip the latency/energy procedure");
  run->add_flag("--no-accuracy", run_no_accuracy, "Skip the accuracy procedure");
  run->add_option("--division", run_division, "Submission division")
      ->check(CLI::IsMember({"closed", "open"}));
  run->add_option("--modified", run_modified,
                  "Components changed from the reference (repeatable)");
  run->add_option("--quantization", run_quantization, "none|ptq|qat")
      ->check(CLI::IsMember({"none", "ptq", "qat"}));
  run->add_option("--deviations-doc", run_deviations,
                  "Open-division deviation description");

  auto* score = app.add_subcommand("score", "Recompute scores from stored raw data");
  std::string score_dir;
  bool score_verify = false;
  score->add_option("dir", score_dir, "Results folder")->required();
  score->add_flag("--verify", score_verify,
                  "Fail if the manifest disagrees with the raw data");

  auto* validate =
      app.add_subcommand("validate", "Check a results folder against the run rules");
  std::string validate_dir;
  validate->add_option("dir", validate_dir, "Results folder")->required();

  auto* view =
      app.add_subcommand("view-trace", "Export the stored energy trace as (t, mW) rows");
  std::string view_dir;
  std::string view_channel = "dut";
  std::string view_out;
  view->add_option("dir", view_dir, "Results folder")->required();
  view->add_option("--channel", view_channel, "dut|level_shifter")
      ->check(CLI::IsMember({"dut", "level_shifter"}));
  view->add_option("--out", view_out, "Write CSV here instead of stdout");

  auto* sim = app.add_subcommand("sim-dut", "Serve the DUT protocol on stdin/stdout");
  KernelFlags sim_kernel;
  std::string sim_tap;
  add_kernel_flags(sim, sim_kernel);
  sim->add_option("--emon-tap", sim_tap, "Append electrical events to this file");

  auto* gen = app.add_subcommand("gen-fixtures", "Generate a synthetic stimulus dataset");
  std::string gen_benchmark;
  std::string gen_out;
  std::uint32_t gen_count = 20;
  std::optional<std::uint32_t> gen_correct;
  std::optional<std::uint32_t> gen_anomalous;
  std::uint64_t gen_seed = 1;
  gen->add_option("--benchmark", gen_benchmark, "Benchmark id: kws|vww|ic|ad")
      ->required()
      ->check(CLI::IsMember({"kws", "vww", "ic", "ad"}));
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--count", gen_count, "Number of fixtures")->check(CLI::PositiveNumber);
  gen->add_option("--correct", gen_correct,
                  "Classifier fixtures the stub kernel answers correctly");
  gen->add_option("--anomalous", gen_anomalous, "Anomalous fixtures (ad only)");
  gen->add_option("--seed", gen_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return cmd_run(run_kernel, run_mode, run_stimuli, run_out, run_dut,
                     run_runs, run_min_seconds, run_min_iterations,
                     run_max_chunk, run_emon_rate, run_emon_voltage,
                     run_no_performance, run_no_accuracy, run_division,
                     run_modified, run_quantization, run_deviations);
    if (score->parsed()) return cmd_score(score_dir, score_verify);
    if (validate->parsed()) return cmd_validate(validate_dir);
    if (view->parsed()) return cmd_view_trace(view_dir, view_channel, view_out);
    if (sim->parsed()) return cmd_sim_dut(sim_kernel, sim_tap);
    if (gen->parsed())
      return cmd_gen_fixtures(gen_benchmark, gen_out, gen_count, gen_correct,
                              gen_anomalous, gen_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
