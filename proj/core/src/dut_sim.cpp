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
#include "mcubench/dut_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "mcubench/errors.hpp"
#include "mcubench/numfmt.hpp"

namespace mcubench::dut {
namespace {

using protocol::ErrorCode;
using protocol::ErrorRsp;

ErrorRsp err(ErrorCode code, std::string detail) {
  return ErrorRsp{code, std::move(detail)};
}

}  // namespace

InferenceKernel make_classifier_kernel(const scoring::BenchmarkProfile& profile,
                                       std::int64_t latency_us, PowerModel power) {
  if (profile.n_classes == 0)
    throw ContractError("classifier kernel needs a classifier profile");
  if (latency_us <= 0) throw ContractError("kernel latency must be positive");
  std::uint32_t n_classes = profile.n_classes;
  InferenceKernel kernel;
  kernel.power = power;
  kernel.latency_us = [latency_us](std::span<const float>) { return latency_us; };
  kernel.run = [n_classes](std::span<const float> input) {
    std::vector<float> probs(n_classes, 0.0f);
    std::size_t n = std::min<std::size_t>(n_classes, input.size());
    float max_logit = -std::numeric_limits<float>::infinity();
    for (std::size_t k = 0; k < n; ++k) max_logit = std::max(max_logit, input[k]);
    float sum = 0.0f;
    for (std::size_t k = 0; k < n; ++k) {
      probs[k] = std::exp(input[k] - max_logit);
      sum += probs[k];
    }
    for (float& p : probs) p /= sum;
    return probs;
  };
  return kernel;
}

InferenceKernel make_ad_kernel(std::int64_t latency_us, PowerModel power) {
  if (latency_us <= 0) throw ContractError("kernel latency must be positive");
  InferenceKernel kernel;
  kernel.power = power;
  kernel.latency_us = [latency_us](std::span<const float>) { return latency_us; };
  kernel.run = [](std::span<const float> input) {
    std::size_t windows = input.size() / fixture::kAdWindowLen;
    std::vector<float> mses(windows, 0.0f);
    for (std::size_t w = 0; w < windows; ++w) {
      double acc = 0.0;
      for (std::size_t i = 0; i < fixture::kAdWindowLen; ++i) {
        double v = input[w * fixture::kAdWindowLen + i];
        acc += v * v;
      }
      mses[w] = static_cast<float>(acc / fixture::kAdWindowLen);
    }
    return mses;
  };
  return kernel;
}

InferenceKernel make_kernel(const scoring::BenchmarkProfile& profile,
                            std::int64_t latency_us, PowerModel power) {
  return profile.metric_kind == scoring::MetricKind::kTop1
             ? make_classifier_kernel(profile, latency_us, power)
             : make_ad_kernel(latency_us, power);
}

std::string serialize(const DutEvent& event) {
  std::string out;
  switch (event.kind) {
    case DutEvent::Kind::kPowerIdle:
      out = "power-idle " + numfmt::format_double(event.mw);
      break;
    case DutEvent::Kind::kPowerShifter:
      out = "power-shifter " + numfmt::format_double(event.mw);
      break;
    case DutEvent::Kind::kEdge:
      out = "edge " + std::to_string(event.t0_us);
      break;
    case DutEvent::Kind::kActive:
      out = "active " + std::to_string(event.t0_us) + ' ' +
            std::to_string(event.t1_us) + ' ' + numfmt::format_double(event.mw);
      break;
  }
  out.push_back('\n');
  return out;
}

bool parse_event(std::string_view line, DutEvent& out) {
  if (line.ends_with('\n')) line.remove_suffix(1);
  auto take = [&line]() {
    std::size_t sp = line.find(' ');
    std::string_view tok = sp == std::string_view::npos ? line : line.substr(0, sp);
    line = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
    return tok;
  };
  std::string_view kind = take();
  if (kind == "power-idle" || kind == "power-shifter") {
    out.kind = kind == "power-idle" ? DutEvent::Kind::kPowerIdle
                                    : DutEvent::Kind::kPowerShifter;
    out.t0_us = out.t1_us = 0;
    return numfmt::parse_double(take(), out.mw) && line.empty();
  }
  if (kind == "edge") {
    out.kind = DutEvent::Kind::kEdge;
    out.t1_us = 0;
    out.mw = 0.0;
    return numfmt::parse_i64(take(), out.t0_us) && line.empty();
  }
  if (kind == "active") {
    out.kind = DutEvent::Kind::kActive;
    return numfmt::parse_i64(take(), out.t0_us) &&
           numfmt::parse_i64(take(), out.t1_us) &&
           numfmt::parse_double(take(), out.mw) && line.empty();
  }
  return false;
}

DutSession::DutSession(DutConfig config) : config_(std::move(config)) {
  if (!config_.kernel.latency_us || !config_.kernel.run)
    throw ContractError("DutSession: kernel functions must be set");
  pending_events_.push_back(
      {DutEvent::Kind::kPowerIdle, 0, 0, config_.kernel.power.idle_mw});
  pending_events_.push_back(
      {DutEvent::Kind::kPowerShifter, 0, 0, config_.level_shifter_mw});
}

std::vector<DutEvent> DutSession::drain_events() {
  std::vector<DutEvent> out;
  out.swap(pending_events_);
  return out;
}

protocol::Response DutSession::do_timestamp() {
  if (mode_ == protocol::Mode::kPerformance)
    return protocol::TimestampIsRsp{clock_us_};
  // Energy mode: emit a falling edge. Edge times must be strictly
  // increasing, so a back-to-back toggle with no intervening work still
  // takes one microsecond of GPIO time.
  if (!trigger_log_.empty() && trigger_log_.back() == clock_us_) ++clock_us_;
  trigger_log_.push_back(clock_us_);
  pending_events_.push_back({DutEvent::Kind::kEdge, clock_us_, 0, 0.0});
  return protocol::AckRsp{};
}

protocol::Response DutSession::do_load_chunk(const protocol::LoadChunkCmd& cmd) {
  if (cmd.offset == 0) {
    rx_buffer_.clear();  // a fresh download may always restart the buffer
    download_complete_ = false;
  } else if (cmd.offset != rx_buffer_.size()) {
    return err(ErrorCode::kMalformed, "noncontiguous chunk offset");
  }
  rx_buffer_.append(reinterpret_cast<const char*>(cmd.payload.data()),
                    cmd.payload.size());
  return protocol::AckRsp{};
}

protocol::Response DutSession::do_load_done(const protocol::LoadDoneCmd& cmd) {
  if (cmd.total_len != rx_buffer_.size())
    return err(ErrorCode::kLenMismatch,
               "declared " + std::to_string(cmd.total_len) + " received " +
                   std::to_string(rx_buffer_.size()));
  download_complete_ = true;
  return protocol::AckRsp{};
}

protocol::Response DutSession::do_set_tensor() {
  if (!download_complete_)
    return err(ErrorCode::kNotReady, "no completed download to convert");
  fixture::Fixture f;
  try {
    f = fixture::deserialize(rx_buffer_);
  } catch (const ContractError& e) {
    return err(ErrorCode::kBadFixture, e.what());
  }
  if (f.use_case != config_.use_case)
    return err(ErrorCode::kBadFixture, "stimulus is for another benchmark");
  if (config_.use_case != scoring::UseCase::kAd) {
    const auto& profile = scoring::profile_for(config_.use_case);
    if (f.tensor.size() != scoring::input_tensor_len(profile))
      return err(ErrorCode::kBadFixture, "tensor length does not match model input");
  }
  stimulus_ = std::move(f);
  rx_buffer_.clear();
  download_complete_ = false;
  return protocol::AckRsp{};
}

protocol::Response DutSession::do_infer(const protocol::InferCmd& cmd) {
  if (!stimulus_) return err(ErrorCode::kNotReady, "no input tensor set");
  std::span<const float> input(stimulus_->tensor);
  std::int64_t per_inference = config_.kernel.latency_us(input);
  if (per_inference <= 0)
    return err(ErrorCode::kInternal, "kernel reported non-positive latency");
  std::int64_t total =
      static_cast<std::int64_t>(cmd.iterations + cmd.warmup) * per_inference;
  std::int64_t start = clock_us_;
  clock_us_ += total;
  pending_events_.push_back({DutEvent::Kind::kActive, start, clock_us_,
                             config_.kernel.power.active_mw});
  last_result_ = config_.kernel.run(input);
  return protocol::AckRsp{};
}

protocol::Response DutSession::do_results() {
  if (!last_result_) return err(ErrorCode::kNotReady, "no inference has run");
  protocol::ResultTensorRsp rsp;
  rsp.values.assign(last_result_->begin(), last_result_->end());
  return rsp;
}

protocol::Response DutSession::handle(const protocol::Command& cmd) {
  return std::visit(
      [this](const auto& c) -> protocol::Response {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, protocol::NameCmd>) {
          return protocol::NameIsRsp{config_.name};
        } else if constexpr (std::is_same_v<T, protocol::TimestampCmd>) {
          return do_timestamp();
        } else if constexpr (std::is_same_v<T, protocol::LoadChunkCmd>) {
          return do_load_chunk(c);
        } else if constexpr (std::is_same_v<T, protocol::LoadDoneCmd>) {
          return do_load_done(c);
        } else if constexpr (std::is_same_v<T, protocol::SetTensorCmd>) {
          return do_set_tensor();
        } else if constexpr (std::is_same_v<T, protocol::InferCmd>) {
          return do_infer(c);
        } else if constexpr (std::is_same_v<T, protocol::GetResultsCmd>) {
          return do_results();
        } else {
          static_assert(std::is_same_v<T, protocol::SetModeCmd>);
          mode_ = c.mode;
          return protocol::AckRsp{};
        }
      },
      cmd);
}

protocol::Response DutSession::handle_line(std::string_view line) {
  protocol::ParsedLine parsed = protocol::parse_line(line);
  if (const auto* cmd = std::get_if<protocol::Command>(&parsed)) {
    return handle(*cmd);
  }
  if (const auto* failure = std::get_if<protocol::ParseFailure>(&parsed)) {
    return err(failure->unknown_keyword ? ErrorCode::kUnknown : ErrorCode::kMalformed,
               failure->reason);
  }
  return err(ErrorCode::kMalformed, "response received on command channel");
}

int serve_stream(std::istream& in, std::ostream& out, DutSession& session,
                 std::ostream* tap) {
  auto flush_events = [&session, tap]() {
    std::vector<DutEvent> events = session.drain_events();
    if (!tap) return;
    for (const DutEvent& e : events) *tap << serialize(e);
    tap->flush();
  };

  out << protocol::encode(session.greeting());
  flush_events();
  out.flush();

  std::string line;
  while (std::getline(in, line)) {
    // getline hitting end-of-stream before a newline means the link died
    // mid-command; the fragment is not a command.
    if (in.eof()) return 1;
    protocol::Response rsp = session.handle_line(line);
    flush_events();
    out << protocol::encode(rsp);
    out.flush();
  }
  return 0;
}

}  // namespace mcubench::dut
