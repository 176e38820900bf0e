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
#ifndef MCUBENCH_PROTOCOL_HPP_
#define MCUBENCH_PROTOCOL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcubench::protocol {

// Line-oriented ASCII wire grammar between the host runner and the DUT.
// One message per newline-terminated line, binary payloads hex-encoded,
// strictly one in-flight command at a time. The full BNF lives in
// docs/protocol.md.

inline constexpr std::size_t kDefaultMaxChunk = 512;  // bytes per `db` line

enum class Mode { kPerformance, kEnergy };

// ---- Commands (host -> DUT) ----

struct NameCmd {
  bool operator==(const NameCmd&) const = default;
};
struct TimestampCmd {
  bool operator==(const TimestampCmd&) const = default;
};
struct LoadChunkCmd {
  std::uint64_t offset = 0;         // byte index into the download buffer
  std::vector<std::uint8_t> payload;  // 1..max_chunk bytes
  bool operator==(const LoadChunkCmd&) const = default;
};
struct LoadDoneCmd {
  std::uint64_t total_len = 0;  // declared total byte count
  bool operator==(const LoadDoneCmd&) const = default;
};
struct SetTensorCmd {
  bool operator==(const SetTensorCmd&) const = default;
};
struct InferCmd {
  std::uint64_t iterations = 1;  // >= 1
  std::uint64_t warmup = 0;
  bool operator==(const InferCmd&) const = default;
};
struct GetResultsCmd {
  bool operator==(const GetResultsCmd&) const = default;
};
struct SetModeCmd {
  Mode mode = Mode::kPerformance;
  bool operator==(const SetModeCmd&) const = default;
};

using Command = std::variant<NameCmd, TimestampCmd, LoadChunkCmd, LoadDoneCmd,
                             SetTensorCmd, InferCmd, GetResultsCmd, SetModeCmd>;

// ---- Responses (DUT -> host) ----

enum class ErrorCode {
  kMalformed,     // unparseable or invariant-violating line
  kNotReady,      // command issued before its prerequisite state
  kUnknown,       // keyword not in the grammar
  kLenMismatch,   // db-done total != bytes received
  kBadFixture,    // downloaded buffer is not a valid stimulus fixture
  kInternal,
};

struct ReadyRsp {
  bool operator==(const ReadyRsp&) const = default;
};
struct NameIsRsp {
  std::string id;  // [A-Za-z0-9._-]+, non-empty
  bool operator==(const NameIsRsp&) const = default;
};
struct TimestampIsRsp {
  std::int64_t micros = 0;  // resolution finer than 1 ms by construction
  bool operator==(const TimestampIsRsp&) const = default;
};
struct AckRsp {
  bool operator==(const AckRsp&) const = default;
};
struct ResultTensorRsp {
  std::vector<double> values;  // finite reals
  bool operator==(const ResultTensorRsp&) const = default;
};
struct ErrorRsp {
  ErrorCode code = ErrorCode::kInternal;
  std::string detail;  // single line of printable ASCII, may be empty
  bool operator==(const ErrorRsp&) const = default;
};

using Response = std::variant<ReadyRsp, NameIsRsp, TimestampIsRsp, AckRsp,
                              ResultTensorRsp, ErrorRsp>;

struct ParseFailure {
  std::string reason;
  bool unknown_keyword = false;  // grammar keyword not recognized at all
};

using ParsedLine = std::variant<Command, Response, ParseFailure>;

// Validates the message's type invariants; throws ContractError on violation.
void validate(const Command& cmd);
void validate(const Response& rsp);

// Deterministic single-line encoding, newline-terminated. The message must
// satisfy its invariants (throws ContractError otherwise).
std::string encode(const Command& cmd);
std::string encode(const Response& rsp);

// Total: any byte sequence yields either a message or a ParseFailure, never
// an exception. A trailing "\n" or "\r\n" is tolerated and stripped.
ParsedLine parse_line(std::string_view line);

std::string_view error_code_token(ErrorCode code);

// Splits the stimulus bytes into contiguous LoadChunk commands of at most
// max_chunk bytes each, terminated by LoadDone(total). Reassembling the
// payloads in order reproduces `data` exactly.
std::vector<Command> chunk_input(std::string_view data, std::size_t max_chunk);

// Incremental line framer for byte streams. Bytes may arrive split at
// arbitrary boundaries; feed() returns every line completed so far with the
// terminator stripped.
class LineBuffer {
 public:
  std::vector<std::string> feed(std::string_view bytes);
  bool has_partial() const { return !pending_.empty(); }
  const std::string& partial() const { return pending_; }

 private:
  std::string pending_;
};

}  // namespace mcubench::protocol

#endif  // MCUBENCH_PROTOCOL_HPP_
