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
#ifndef MCUBENCH_EMON_HPP_
#define MCUBENCH_EMON_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mcubench::emon {

// Two supply channels: the DUT core, and the level shifters whose draw is
// framework overhead and never counts toward the energy score.
enum class Channel { kDut, kLevelShifter };

struct EnergySample {
  double t_s = 0.0;       // seconds, monotone within a trace
  double voltage_v = 0.0;
  double current_a = 0.0;
  Channel channel = Channel::kDut;
};

struct EnergyTrace {
  std::vector<EnergySample> samples;  // time-sorted, channels interleaved
  std::vector<double> triggers_s;     // falling-edge times, strictly increasing
  double sample_rate_hz = 0.0;        // per-channel spacing = 1/sample_rate
  double supply_voltage_v = 0.0;
};

struct Window {
  double t_start_s = 0.0;
  double t_end_s = 0.0;
};

struct PowerLevels {
  double dut_mw = 0.0;
  double shifter_mw = 0.0;
};

// Right-continuous piecewise-constant power profile for both channels.
// Sampling exactly on a step evaluates to the mean of the two levels, which
// keeps the trapezoidal integral of grid-aligned steps exact and therefore
// independent of the sample rate.
class PiecewisePower {
 public:
  PiecewisePower(double dut_mw, double shifter_mw);

  // Levels from t_s onward. Steps may be added in any order; equal times
  // overwrite. Throws ContractError for negative power or negative time.
  void add_step(double t_s, double dut_mw, double shifter_mw);

  PowerLevels value_at(double t_s) const;   // right-continuous
  PowerLevels sample_at(double t_s) const;  // midpoint convention on steps
  double end_time_s() const;                // time of the last step

 private:
  struct Step {
    double t_s;
    PowerLevels levels;
  };
  std::vector<Step> steps_;  // sorted by t_s; steps_[0].t_s == 0
};

// Realizes the profile as uniformly spaced samples on the absolute grid
// t = k / sample_rate for both channels, covering [0, t_end_s] plus one
// period of margin, with current = power / supply_voltage. Triggers are
// copied through (must be strictly increasing).
EnergyTrace simulate_trace(const PiecewisePower& profile,
                           std::span<const double> triggers_s,
                           double sample_rate_hz, double supply_voltage_v,
                           double t_end_s);

// The timing window bracketed by the first and last falling edge. Throws
// MeasurementError with fewer than two triggers.
Window find_window(const EnergyTrace& trace);

// Trapezoidal integral of voltage*current over the window for one channel,
// with linear interpolation at the window endpoints. Throws MeasurementError
// for empty windows or windows outside the sampled span.
double integrate_joules(const EnergyTrace& trace, const Window& window,
                        Channel channel);

// CSV export/import: header "t,channel,voltage,current" with channel names
// "dut" and "level_shifter"; the sidecar trigger file is one time per line.
void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& trace);
void write_triggers_csv(const std::filesystem::path& path, const EnergyTrace& trace);
EnergyTrace read_trace_csv(const std::filesystem::path& trace_path,
                           const std::filesystem::path& triggers_path);

}  // namespace mcubench::emon

#endif  // MCUBENCH_EMON_HPP_
