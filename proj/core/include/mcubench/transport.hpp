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
#ifndef MCUBENCH_TRANSPORT_HPP_
#define MCUBENCH_TRANSPORT_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mcubench/dut_sim.hpp"
#include "mcubench/protocol.hpp"

namespace mcubench::transport {

// Strict one-in-flight command link to a DUT. request() throws ProtocolError
// when the device answers with garbage or not at all; the DUT's own Error
// responses are returned, not thrown.
class DutLink {
 public:
  virtual ~DutLink() = default;

  virtual protocol::Response request(const protocol::Command& cmd) = 0;

  // Electrical tap feeding the simulated energy monitor. Returns every event
  // produced since the previous drain, in emission order.
  virtual std::vector<dut::DutEvent> drain_events() = 0;

  // Byte-exact log of the session: the DUT greeting, then every command and
  // response line in order.
  virtual const std::string& transcript() const = 0;
};

// Drives a DutSession in the same process. Commands still round-trip
// through the wire encoding so the transcript matches a piped session
// byte for byte.
class InProcessLink : public DutLink {
 public:
  explicit InProcessLink(dut::DutSession& session);

  protocol::Response request(const protocol::Command& cmd) override;
  std::vector<dut::DutEvent> drain_events() override;
  const std::string& transcript() const override { return transcript_; }

 private:
  dut::DutSession& session_;
  std::string transcript_;
};

struct SubprocessOptions {
  std::vector<std::string> argv;      // program + arguments
  std::filesystem::path tap_path;     // event tap file; empty disables drain
  int response_timeout_ms = 5000;     // host inactivity limit per response
};

// Spawns the DUT as a child process connected by pipes on stdin/stdout and
// speaks the protocol over them. The constructor waits for the ready
// greeting; the destructor closes the stream and reaps the child.
class SubprocessLink : public DutLink {
 public:
  explicit SubprocessLink(SubprocessOptions options);
  ~SubprocessLink() override;

  SubprocessLink(const SubprocessLink&) = delete;
  SubprocessLink& operator=(const SubprocessLink&) = delete;

  protocol::Response request(const protocol::Command& cmd) override;
  std::vector<dut::DutEvent> drain_events() override;
  const std::string& transcript() const override { return transcript_; }

  // Closes stdin (end-of-stream for the DUT) and returns its exit status.
  int close_and_wait();

 private:
  std::string read_line();
  void write_all(const std::string& bytes);

  SubprocessOptions options_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string rx_pending_;
  std::size_t tap_offset_ = 0;
  std::string transcript_;
  bool reaped_ = false;
  int exit_status_ = -1;
};

}  // namespace mcubench::transport

#endif  // MCUBENCH_TRANSPORT_HPP_
