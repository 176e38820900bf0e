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
#include "mcubench/transport.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "mcubench/errors.hpp"

namespace mcubench::transport {
namespace {

protocol::Response expect_response(const protocol::ParsedLine& parsed,
                                   std::string_view raw) {
  if (const auto* rsp = std::get_if<protocol::Response>(&parsed)) return *rsp;
  throw ProtocolError("DUT sent an unparseable line: '" + std::string(raw) + "'");
}

void ignore_sigpipe_once() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

InProcessLink::InProcessLink(dut::DutSession& session) : session_(session) {
  transcript_ += protocol::encode(session_.greeting());
}

protocol::Response InProcessLink::request(const protocol::Command& cmd) {
  std::string line = protocol::encode(cmd);
  transcript_ += line;
  protocol::Response rsp = session_.handle_line(line);
  transcript_ += protocol::encode(rsp);
  return rsp;
}

std::vector<dut::DutEvent> InProcessLink::drain_events() {
  return session_.drain_events();
}

SubprocessLink::SubprocessLink(SubprocessOptions options)
    : options_(std::move(options)) {
  if (options_.argv.empty())
    throw ContractError("SubprocessLink: empty command line");
  ignore_sigpipe_once();

  int to_child[2];    // parent writes -> child stdin
  int from_child[2];  // child stdout -> parent reads
  if (::pipe(to_child) != 0) throw ProtocolError("pipe() failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw ProtocolError("pipe() failed");
  }

  child_pid_ = ::fork();
  if (child_pid_ < 0) throw ProtocolError("fork() failed");
  if (child_pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> argv;
    argv.reserve(options_.argv.size() + 1);
    for (auto& a : options_.argv) argv.push_back(a.data());
    argv.push_back(nullptr);
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }

  ::close(to_child[0]);
  ::close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];

  std::string greeting = read_line();
  protocol::ParsedLine parsed = protocol::parse_line(greeting);
  protocol::Response rsp = expect_response(parsed, greeting);
  if (!std::holds_alternative<protocol::ReadyRsp>(rsp))
    throw ProtocolError("DUT did not announce readiness");
  transcript_ += greeting + "\n";
}

SubprocessLink::~SubprocessLink() {
  try {
    close_and_wait();
  } catch (...) {
    // destructor must not throw; the child is reaped best-effort
  }
}

int SubprocessLink::close_and_wait() {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
  if (!reaped_ && child_pid_ > 0) {
    int status = 0;
    if (::waitpid(child_pid_, &status, 0) == child_pid_) {
      exit_status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    }
    reaped_ = true;
  }
  return exit_status_;
}

void SubprocessLink::write_all(const std::string& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::write(to_child_, bytes.data() + off, bytes.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("write to DUT failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessLink::read_line() {
  for (;;) {
    std::size_t nl = rx_pending_.find('\n');
    if (nl != std::string::npos) {
      std::string line = rx_pending_.substr(0, nl);
      rx_pending_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    struct pollfd pfd{from_child_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, options_.response_timeout_ms);
    if (rc == 0) throw ProtocolError("no response from DUT within timeout");
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    char buf[4096];
    ssize_t n = ::read(from_child_, buf, sizeof(buf));
    if (n == 0) throw ProtocolError("DUT closed the stream mid-session");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read from DUT failed: ") + std::strerror(errno));
    }
    rx_pending_.append(buf, static_cast<std::size_t>(n));
  }
}

protocol::Response SubprocessLink::request(const protocol::Command& cmd) {
  std::string line = protocol::encode(cmd);
  write_all(line);
  transcript_ += line;
  std::string reply = read_line();
  transcript_ += reply + "\n";
  return expect_response(protocol::parse_line(reply), reply);
}

std::vector<dut::DutEvent> SubprocessLink::drain_events() {
  std::vector<dut::DutEvent> events;
  if (options_.tap_path.empty()) return events;
  std::ifstream tap(options_.tap_path, std::ios::binary);
  if (!tap) return events;
  tap.seekg(static_cast<std::streamoff>(tap_offset_));
  std::string line;
  while (std::getline(tap, line)) {
    // The DUT flushes whole lines before responding, so a tail without a
    // newline means we raced a write; leave it for the next drain.
    if (tap.eof()) break;
    dut::DutEvent event;
    if (!dut::parse_event(line, event))
      throw ProtocolError("corrupt event tap line: '" + line + "'");
    events.push_back(event);
    tap_offset_ += line.size() + 1;
  }
  return events;
}

}  // namespace mcubench::transport
