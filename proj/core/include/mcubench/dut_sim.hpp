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
#ifndef MCUBENCH_DUT_SIM_HPP_
#define MCUBENCH_DUT_SIM_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcubench/fixture.hpp"
#include "mcubench/protocol.hpp"
#include "mcubench/scoring.hpp"

namespace mcubench::dut {

struct PowerModel {
  double active_mw = 30.0;  // while an inference loop runs
  double idle_mw = 5.0;
};

// Pluggable stand-in for the device's inference stack. Both functions must
// be deterministic; latency is virtual microseconds per single inference.
struct InferenceKernel {
  std::function<std::int64_t(std::span<const float>)> latency_us;
  std::function<std::vector<float>(std::span<const float>)> run;
  PowerModel power;
};

// Classifier stub: softmax over the first n_classes tensor values, so the
// fixture's leading logits decide the prediction.
InferenceKernel make_classifier_kernel(const scoring::BenchmarkProfile& profile,
                                       std::int64_t latency_us, PowerModel power);

// Autoencoder stub: the tensor is consecutive 640-value windows; the
// reconstruction is identically zero, so each window's MSE is mean(x^2).
InferenceKernel make_ad_kernel(std::int64_t latency_us, PowerModel power);

InferenceKernel make_kernel(const scoring::BenchmarkProfile& profile,
                            std::int64_t latency_us, PowerModel power);

// Out-of-band electrical tap consumed by the simulated energy monitor:
// power levels, GPIO falling edges, and powered inference intervals, all in
// virtual microseconds.
struct DutEvent {
  enum class Kind { kPowerIdle, kPowerShifter, kEdge, kActive };
  Kind kind = Kind::kEdge;
  std::int64_t t0_us = 0;
  std::int64_t t1_us = 0;  // kActive only
  double mw = 0.0;         // power kinds and kActive

  bool operator==(const DutEvent&) const = default;
};

std::string serialize(const DutEvent& event);  // one line, '\n'-terminated
bool parse_event(std::string_view line, DutEvent& out);

struct DutConfig {
  std::string name = "sim-dut";
  scoring::UseCase use_case = scoring::UseCase::kIc;
  InferenceKernel kernel;
  double level_shifter_mw = 10.0;
};

// One simulated device: the five-function firmware API behind the wire
// protocol, advancing a virtual clock only on modeled work. Deterministic:
// the same command sequence always yields the same responses, clock, and
// event stream. Single-threaded by contract.
class DutSession {
 public:
  explicit DutSession(DutConfig config);

  protocol::Response greeting() const { return protocol::ReadyRsp{}; }
  protocol::Response handle(const protocol::Command& cmd);
  // Total: malformed bytes produce an Error response, never an exception.
  protocol::Response handle_line(std::string_view line);

  std::vector<DutEvent> drain_events();

  std::int64_t clock_us() const { return clock_us_; }
  protocol::Mode mode() const { return mode_; }
  const std::vector<std::int64_t>& trigger_log() const { return trigger_log_; }
  const std::optional<fixture::Fixture>& stimulus() const { return stimulus_; }

 private:
  protocol::Response do_timestamp();
  protocol::Response do_load_chunk(const protocol::LoadChunkCmd& cmd);
  protocol::Response do_load_done(const protocol::LoadDoneCmd& cmd);
  protocol::Response do_set_tensor();
  protocol::Response do_infer(const protocol::InferCmd& cmd);
  protocol::Response do_results();

  DutConfig config_;
  protocol::Mode mode_ = protocol::Mode::kPerformance;
  std::string rx_buffer_;
  bool download_complete_ = false;
  std::optional<fixture::Fixture> stimulus_;
  std::optional<std::vector<float>> last_result_;
  std::int64_t clock_us_ = 0;
  std::vector<std::int64_t> trigger_log_;  // strictly increasing
  std::vector<DutEvent> pending_events_;
};

// Serves the protocol over a byte stream until end-of-stream: the subprocess
// body behind `sim-dut`. Events are flushed to `tap` (when non-null) before
// each response is written. Returns the process exit status: nonzero when
// the stream dies mid-command (trailing bytes with no newline).
int serve_stream(std::istream& in, std::ostream& out, DutSession& session,
                 std::ostream* tap);

}  // namespace mcubench::dut

#endif  // MCUBENCH_DUT_SIM_HPP_
