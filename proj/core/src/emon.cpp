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
#include "mcubench/emon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mcubench/errors.hpp"
#include "mcubench/numfmt.hpp"

namespace mcubench::emon {
namespace {

void check_levels(double dut_mw, double shifter_mw) {
  if (!(dut_mw >= 0.0) || !(shifter_mw >= 0.0))
    throw ContractError("power profile: negative power level");
}

std::string_view channel_name(Channel c) {
  return c == Channel::kDut ? "dut" : "level_shifter";
}

}  // namespace

PiecewisePower::PiecewisePower(double dut_mw, double shifter_mw) {
  check_levels(dut_mw, shifter_mw);
  steps_.push_back({0.0, {dut_mw, shifter_mw}});
}

void PiecewisePower::add_step(double t_s, double dut_mw, double shifter_mw) {
  check_levels(dut_mw, shifter_mw);
  if (!(t_s >= 0.0)) throw ContractError("power profile: negative step time");
  Step step{t_s, {dut_mw, shifter_mw}};
  auto it = std::lower_bound(
      steps_.begin(), steps_.end(), t_s,
      [](const Step& s, double t) { return s.t_s < t; });
  if (it != steps_.end() && it->t_s == t_s) {
    it->levels = step.levels;
  } else {
    steps_.insert(it, step);
  }
}

PowerLevels PiecewisePower::value_at(double t_s) const {
  auto it = std::upper_bound(
      steps_.begin(), steps_.end(), t_s,
      [](double t, const Step& s) { return t < s.t_s; });
  if (it == steps_.begin()) return steps_.front().levels;  // before t=0
  return std::prev(it)->levels;
}

PowerLevels PiecewisePower::sample_at(double t_s) const {
  auto it = std::lower_bound(
      steps_.begin(), steps_.end(), t_s,
      [](const Step& s, double t) { return s.t_s < t; });
  if (it != steps_.end() && it->t_s == t_s && it != steps_.begin()) {
    // A sampling instant landing exactly on a step reads the midpoint, the
    // way a band-limited front end straddles an instantaneous transition.
    const PowerLevels& before = std::prev(it)->levels;
    const PowerLevels& after = it->levels;
    return {0.5 * (before.dut_mw + after.dut_mw),
            0.5 * (before.shifter_mw + after.shifter_mw)};
  }
  return value_at(t_s);
}

double PiecewisePower::end_time_s() const { return steps_.back().t_s; }

EnergyTrace simulate_trace(const PiecewisePower& profile,
                           std::span<const double> triggers_s,
                           double sample_rate_hz, double supply_voltage_v,
                           double t_end_s) {
  if (!(sample_rate_hz > 0.0))
    throw ContractError("simulate_trace: sample rate must be positive");
  if (!(supply_voltage_v > 0.0))
    throw ContractError("simulate_trace: supply voltage must be positive");
  for (std::size_t i = 1; i < triggers_s.size(); ++i) {
    if (!(triggers_s[i] > triggers_s[i - 1]))
      throw ContractError("simulate_trace: triggers must be strictly increasing");
  }

  double span = std::max(t_end_s, profile.end_time_s());
  if (!triggers_s.empty()) span = std::max(span, triggers_s.back());

  EnergyTrace trace;
  trace.sample_rate_hz = sample_rate_hz;
  trace.supply_voltage_v = supply_voltage_v;
  trace.triggers_s.assign(triggers_s.begin(), triggers_s.end());

  auto n = static_cast<std::int64_t>(std::ceil(span * sample_rate_hz)) + 1;
  trace.samples.reserve(static_cast<std::size_t>(n + 1) * 2);
  for (std::int64_t k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / sample_rate_hz;
    PowerLevels p = profile.sample_at(t);
    double i_dut = p.dut_mw * 1e-3 / supply_voltage_v;
    double i_shift = p.shifter_mw * 1e-3 / supply_voltage_v;
    trace.samples.push_back({t, supply_voltage_v, i_dut, Channel::kDut});
    trace.samples.push_back({t, supply_voltage_v, i_shift, Channel::kLevelShifter});
  }
  return trace;
}

Window find_window(const EnergyTrace& trace) {
  if (trace.triggers_s.size() < 2)
    throw MeasurementError("find_window: need at least two trigger edges");
  return {trace.triggers_s.front(), trace.triggers_s.back()};
}

double integrate_joules(const EnergyTrace& trace, const Window& window,
                        Channel channel) {
  if (!(window.t_end_s > window.t_start_s))
    throw MeasurementError("integrate: empty window");

  // Pull this channel's power curve out of the interleaved sample list.
  std::vector<double> t;
  std::vector<double> p;
  t.reserve(trace.samples.size() / 2);
  p.reserve(trace.samples.size() / 2);
  for (const auto& s : trace.samples) {
    if (s.channel != channel) continue;
    if (!t.empty() && !(s.t_s >= t.back()))
      throw MeasurementError("integrate: trace samples not time-sorted");
    t.push_back(s.t_s);
    p.push_back(s.voltage_v * s.current_a);
  }
  if (t.size() < 2 || window.t_start_s < t.front() || window.t_end_s > t.back())
    throw MeasurementError("integrate: no samples covering the window");

  auto interp = [&](double at) {
    auto it = std::upper_bound(t.begin(), t.end(), at);
    std::size_t hi = static_cast<std::size_t>(it - t.begin());
    if (hi == 0) return p.front();
    if (hi == t.size()) return p.back();
    std::size_t lo = hi - 1;
    double dt = t[hi] - t[lo];
    if (dt <= 0.0) return p[lo];
    double w = (at - t[lo]) / dt;
    return p[lo] + w * (p[hi] - p[lo]);
  };

  double pa = interp(window.t_start_s);
  double pb = interp(window.t_end_s);

  // Interior samples strictly inside (a, b).
  std::size_t i0 = static_cast<std::size_t>(
      std::upper_bound(t.begin(), t.end(), window.t_start_s) - t.begin());
  std::size_t i1 = static_cast<std::size_t>(
      std::lower_bound(t.begin(), t.end(), window.t_end_s) - t.begin());

  if (i0 >= i1) {
    return 0.5 * (pa + pb) * (window.t_end_s - window.t_start_s);
  }
  double total = 0.5 * (pa + p[i0]) * (t[i0] - window.t_start_s);
  for (std::size_t i = i0; i + 1 < i1; ++i)
    total += 0.5 * (p[i] + p[i + 1]) * (t[i + 1] - t[i]);
  total += 0.5 * (p[i1 - 1] + pb) * (window.t_end_s - t[i1 - 1]);
  return total;
}

void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StoreError("cannot open trace for writing: " + path.string());
  out << "t,channel,voltage,current\n";
  for (const auto& s : trace.samples) {
    out << numfmt::format_double(s.t_s) << ',' << channel_name(s.channel) << ','
        << numfmt::format_double(s.voltage_v) << ','
        << numfmt::format_double(s.current_a) << '\n';
  }
  if (!out) throw StoreError("short write: " + path.string());
}

void write_triggers_csv(const std::filesystem::path& path, const EnergyTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StoreError("cannot open triggers for writing: " + path.string());
  out << "t\n";
  for (double t : trace.triggers_s) out << numfmt::format_double(t) << '\n';
  if (!out) throw StoreError("short write: " + path.string());
}

EnergyTrace read_trace_csv(const std::filesystem::path& trace_path,
                           const std::filesystem::path& triggers_path) {
  std::ifstream in(trace_path);
  if (!in) throw StoreError("cannot open trace: " + trace_path.string());
  EnergyTrace trace;
  std::string line;
  if (!std::getline(in, line) || line != "t,channel,voltage,current")
    throw StoreError("corrupt trace: bad header in " + trace_path.string());
  while (std::getline(in, line)) {
    if (line.empty()) throw StoreError("corrupt trace: blank row");
    EnergySample s;
    std::string_view rest = line;
    auto take = [&rest]() {
      std::size_t comma = rest.find(',');
      std::string_view tok =
          comma == std::string_view::npos ? rest : rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      return tok;
    };
    std::string_view t_tok = take();
    std::string_view ch_tok = take();
    std::string_view v_tok = take();
    std::string_view i_tok = take();
    if (!numfmt::parse_double(t_tok, s.t_s) ||
        !numfmt::parse_double(v_tok, s.voltage_v) ||
        !numfmt::parse_double(i_tok, s.current_a) || !rest.empty())
      throw StoreError("corrupt trace: bad row '" + line + "'");
    if (ch_tok == "dut") {
      s.channel = Channel::kDut;
    } else if (ch_tok == "level_shifter") {
      s.channel = Channel::kLevelShifter;
    } else {
      throw StoreError("corrupt trace: unknown channel");
    }
    if (!trace.samples.empty() && s.t_s < trace.samples.back().t_s)
      throw StoreError("corrupt trace: samples out of order");
    trace.samples.push_back(s);
  }
  if (trace.samples.empty()) throw StoreError("corrupt trace: no samples");
  trace.supply_voltage_v = trace.samples.front().voltage_v;

  std::ifstream trig(triggers_path);
  if (!trig) throw StoreError("cannot open triggers: " + triggers_path.string());
  if (!std::getline(trig, line) || line != "t")
    throw StoreError("corrupt triggers: bad header");
  while (std::getline(trig, line)) {
    double t = 0.0;
    if (!numfmt::parse_double(line, t))
      throw StoreError("corrupt triggers: bad row '" + line + "'");
    if (!trace.triggers_s.empty() && t <= trace.triggers_s.back())
      throw StoreError("corrupt triggers: not strictly increasing");
    trace.triggers_s.push_back(t);
  }

  // A capture always spans its own trigger edges; a trigger outside the
  // sampled range means the trace file was truncated or mixed up.
  for (double t : trace.triggers_s) {
    if (t < trace.samples.front().t_s || t > trace.samples.back().t_s)
      throw StoreError("corrupt trace: trigger outside the sampled span");
  }

  // Recover the per-channel spacing from the first two DUT samples.
  double t0 = -1.0, t1 = -1.0;
  for (const auto& s : trace.samples) {
    if (s.channel != Channel::kDut) continue;
    if (t0 < 0.0) {
      t0 = s.t_s;
    } else {
      t1 = s.t_s;
      break;
    }
  }
  trace.sample_rate_hz = (t1 > t0 && t0 >= 0.0) ? 1.0 / (t1 - t0) : 0.0;
  return trace;
}

}  // namespace mcubench::emon
