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
#include "mcubench/protocol.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "mcubench/errors.hpp"
#include "mcubench/numfmt.hpp"

namespace mcubench::protocol {
namespace {

// Hard cap on accepted line length; beyond this the link is considered
// desynchronized rather than carrying a plausible message.
constexpr std::size_t kMaxLineBytes = 1 << 20;

constexpr char kHexDigits[] = "0123456789abcdef";

bool is_printable_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c < 0x20 || c > 0x7e) return false;
  }
  return true;
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
}

bool is_valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_name_char(c)) return false;
  }
  return true;
}

void append_u64(std::string& out, std::uint64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
}

void append_hex(std::string& out, const std::vector<std::uint8_t>& bytes) {
  out.reserve(out.size() + bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Pops the next space-delimited token; empty view when exhausted.
std::string_view next_token(std::string_view& rest) {
  std::size_t start = 0;
  while (start < rest.size() && rest[start] == ' ') ++start;
  std::size_t end = start;
  while (end < rest.size() && rest[end] != ' ') ++end;
  std::string_view tok = rest.substr(start, end - start);
  rest.remove_prefix(end);
  return tok;
}

bool parse_u64(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out, 10);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

bool parse_f64(std::string_view tok, double& out) {
  if (tok.empty()) return false;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

ParsedLine fail(std::string reason) { return ParseFailure{std::move(reason)}; }

ParsedLine parse_command(std::string_view keyword, std::string_view rest) {
  if (keyword == "name") {
    if (!rest.empty()) return fail("name takes no arguments");
    return Command{NameCmd{}};
  }
  if (keyword == "timestamp") {
    if (!rest.empty()) return fail("timestamp takes no arguments");
    return Command{TimestampCmd{}};
  }
  if (keyword == "db") {
    LoadChunkCmd cmd;
    std::string_view off = next_token(rest);
    std::string_view hex = next_token(rest);
    if (!next_token(rest).empty()) return fail("db: trailing tokens");
    if (!parse_u64(off, cmd.offset)) return fail("db: bad offset");
    if (hex.empty() || hex.size() % 2 != 0) return fail("db: bad hex payload");
    cmd.payload.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
      int hi = hex_nibble(hex[i]);
      int lo = hex_nibble(hex[i + 1]);
      if (hi < 0 || lo < 0) return fail("db: non-hex payload");
      cmd.payload.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    if (cmd.offset > std::numeric_limits<std::uint64_t>::max() - cmd.payload.size())
      return fail("db: offset overflow");
    return Command{cmd};
  }
  if (keyword == "db-done") {
    LoadDoneCmd cmd;
    std::string_view len = next_token(rest);
    if (!next_token(rest).empty()) return fail("db-done: trailing tokens");
    if (!parse_u64(len, cmd.total_len)) return fail("db-done: bad length");
    return Command{cmd};
  }
  if (keyword == "set-tensor") {
    if (!rest.empty()) return fail("set-tensor takes no arguments");
    return Command{SetTensorCmd{}};
  }
  if (keyword == "infer") {
    InferCmd cmd;
    std::string_view n = next_token(rest);
    std::string_view w = next_token(rest);
    if (!next_token(rest).empty()) return fail("infer: trailing tokens");
    if (!parse_u64(n, cmd.iterations)) return fail("infer: bad iteration count");
    if (!parse_u64(w, cmd.warmup)) return fail("infer: bad warmup count");
    if (cmd.iterations < 1) return fail("infer: iterations must be >= 1");
    return Command{cmd};
  }
  if (keyword == "results") {
    if (!rest.empty()) return fail("results takes no arguments");
    return Command{GetResultsCmd{}};
  }
  if (keyword == "mode") {
    std::string_view m = next_token(rest);
    if (!next_token(rest).empty()) return fail("mode: trailing tokens");
    if (m == "perf") return Command{SetModeCmd{Mode::kPerformance}};
    if (m == "energy") return Command{SetModeCmd{Mode::kEnergy}};
    return fail("mode: expected perf|energy");
  }
  return ParseFailure{"unknown keyword", true};
}

ParsedLine parse_response(std::string_view body) {
  // body is the full line starting with "m-".
  if (body == "m-ready") return Response{ReadyRsp{}};
  if (body == "m-ack") return Response{AckRsp{}};
  if (body.starts_with("m-name-")) {
    std::string_view id = body.substr(7);
    if (!is_valid_name(id)) return fail("m-name: bad id");
    return Response{NameIsRsp{std::string(id)}};
  }
  if (body.starts_with("m-lap-us-")) {
    std::uint64_t us = 0;
    if (!parse_u64(body.substr(9), us)) return fail("m-lap-us: bad timestamp");
    if (us > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      return fail("m-lap-us: timestamp overflow");
    return Response{TimestampIsRsp{static_cast<std::int64_t>(us)}};
  }
  if (body.starts_with("m-results-")) {
    std::string_view list = body.substr(10);
    if (list.size() < 2 || list.front() != '[' || list.back() != ']')
      return fail("m-results: expected [..] list");
    list = list.substr(1, list.size() - 2);
    ResultTensorRsp rsp;
    while (!list.empty()) {
      std::size_t comma = list.find(',');
      std::string_view tok =
          comma == std::string_view::npos ? list : list.substr(0, comma);
      double v = 0.0;
      if (!parse_f64(tok, v)) return fail("m-results: bad value");
      if (!std::isfinite(v)) return fail("m-results: non-finite value");
      rsp.values.push_back(v);
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
      if (list.empty()) return fail("m-results: trailing comma");
    }
    return Response{rsp};
  }
  if (body.starts_with("m-err-")) {
    std::string_view rest = body.substr(6);
    std::size_t space = rest.find(' ');
    std::string_view code_tok =
        space == std::string_view::npos ? rest : rest.substr(0, space);
    std::string_view detail =
        space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
    static constexpr std::array<ErrorCode, 6> kCodes = {
        ErrorCode::kMalformed,   ErrorCode::kNotReady, ErrorCode::kUnknown,
        ErrorCode::kLenMismatch, ErrorCode::kBadFixture, ErrorCode::kInternal};
    for (ErrorCode c : kCodes) {
      if (code_tok == error_code_token(c)) {
        if (!is_printable_ascii(detail)) return fail("m-err: bad detail");
        return Response{ErrorRsp{c, std::string(detail)}};
      }
    }
    return fail("m-err: unknown code");
  }
  return fail("unknown response");
}

}  // namespace

std::string_view error_code_token(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformed:   return "malformed";
    case ErrorCode::kNotReady:    return "not-ready";
    case ErrorCode::kUnknown:     return "unknown";
    case ErrorCode::kLenMismatch: return "len-mismatch";
    case ErrorCode::kBadFixture:  return "bad-fixture";
    case ErrorCode::kInternal:    return "internal";
  }
  return "internal";
}

void validate(const Command& cmd) {
  if (const auto* chunk = std::get_if<LoadChunkCmd>(&cmd)) {
    if (chunk->payload.empty())
      throw ContractError("LoadChunk: empty payload");
    if (chunk->offset > std::numeric_limits<std::uint64_t>::max() - chunk->payload.size())
      throw ContractError("LoadChunk: offset overflow");
  } else if (const auto* infer = std::get_if<InferCmd>(&cmd)) {
    if (infer->iterations < 1)
      throw ContractError("Infer: iterations must be >= 1");
  }
}

void validate(const Response& rsp) {
  if (const auto* name = std::get_if<NameIsRsp>(&rsp)) {
    if (!is_valid_name(name->id))
      throw ContractError("NameIs: id must be non-empty [A-Za-z0-9._-]+");
  } else if (const auto* ts = std::get_if<TimestampIsRsp>(&rsp)) {
    if (ts->micros < 0) throw ContractError("TimestampIs: negative time");
  } else if (const auto* res = std::get_if<ResultTensorRsp>(&rsp)) {
    for (double v : res->values) {
      if (!std::isfinite(v))
        throw ContractError("ResultTensor: non-finite value");
    }
  } else if (const auto* err = std::get_if<ErrorRsp>(&rsp)) {
    if (!is_printable_ascii(err->detail))
      throw ContractError("Error: detail must be printable ASCII");
  }
}

std::string encode(const Command& cmd) {
  validate(cmd);
  std::string out;
  std::visit(
      [&out](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NameCmd>) {
          out = "name";
        } else if constexpr (std::is_same_v<T, TimestampCmd>) {
          out = "timestamp";
        } else if constexpr (std::is_same_v<T, LoadChunkCmd>) {
          out = "db ";
          append_u64(out, c.offset);
          out.push_back(' ');
          append_hex(out, c.payload);
        } else if constexpr (std::is_same_v<T, LoadDoneCmd>) {
          out = "db-done ";
          append_u64(out, c.total_len);
        } else if constexpr (std::is_same_v<T, SetTensorCmd>) {
          out = "set-tensor";
        } else if constexpr (std::is_same_v<T, InferCmd>) {
          out = "infer ";
          append_u64(out, c.iterations);
          out.push_back(' ');
          append_u64(out, c.warmup);
        } else if constexpr (std::is_same_v<T, GetResultsCmd>) {
          out = "results";
        } else {
          static_assert(std::is_same_v<T, SetModeCmd>);
          out = c.mode == Mode::kPerformance ? "mode perf" : "mode energy";
        }
      },
      cmd);
  out.push_back('\n');
  return out;
}

std::string encode(const Response& rsp) {
  validate(rsp);
  std::string out;
  std::visit(
      [&out](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ReadyRsp>) {
          out = "m-ready";
        } else if constexpr (std::is_same_v<T, NameIsRsp>) {
          out = "m-name-" + r.id;
        } else if constexpr (std::is_same_v<T, TimestampIsRsp>) {
          out = "m-lap-us-";
          append_u64(out, static_cast<std::uint64_t>(r.micros));
        } else if constexpr (std::is_same_v<T, AckRsp>) {
          out = "m-ack";
        } else if constexpr (std::is_same_v<T, ResultTensorRsp>) {
          out = "m-results-[";
          for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (i) out.push_back(',');
            out += numfmt::format_double(r.values[i]);
          }
          out.push_back(']');
        } else {
          static_assert(std::is_same_v<T, ErrorRsp>);
          out = "m-err-";
          out += error_code_token(r.code);
          if (!r.detail.empty()) {
            out.push_back(' ');
            out += r.detail;
          }
        }
      },
      rsp);
  out.push_back('\n');
  return out;
}

ParsedLine parse_line(std::string_view line) {
  if (line.size() > kMaxLineBytes) return fail("line too long");
  if (line.ends_with('\n')) line.remove_suffix(1);
  if (line.ends_with('\r')) line.remove_suffix(1);
  if (line.empty()) return fail("empty line");
  if (!is_printable_ascii(line)) return fail("non-ASCII bytes");
  if (line.starts_with("m-")) return parse_response(line);
  std::string_view rest = line;
  std::string_view keyword = next_token(rest);
  return parse_command(keyword, rest);
}

std::vector<Command> chunk_input(std::string_view data, std::size_t max_chunk) {
  if (max_chunk < 1) throw ContractError("chunk_input: max_chunk must be >= 1");
  if (data.empty()) throw ContractError("chunk_input: empty input");
  std::vector<Command> cmds;
  cmds.reserve(data.size() / max_chunk + 2);
  for (std::size_t off = 0; off < data.size(); off += max_chunk) {
    std::size_t n = std::min(max_chunk, data.size() - off);
    LoadChunkCmd chunk;
    chunk.offset = off;
    chunk.payload.assign(
        reinterpret_cast<const std::uint8_t*>(data.data()) + off,
        reinterpret_cast<const std::uint8_t*>(data.data()) + off + n);
    cmds.emplace_back(std::move(chunk));
  }
  cmds.emplace_back(LoadDoneCmd{data.size()});
  return cmds;
}

std::vector<std::string> LineBuffer::feed(std::string_view bytes) {
  std::vector<std::string> lines;
  for (char c : bytes) {
    if (c == '\n') {
      if (!pending_.empty() && pending_.back() == '\r') pending_.pop_back();
      lines.push_back(std::move(pending_));
      pending_.clear();
    } else {
      pending_.push_back(c);
    }
  }
  return lines;
}

}  // namespace mcubench::protocol
