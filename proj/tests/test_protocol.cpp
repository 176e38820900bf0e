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

#include <doctest.h>

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mcubench/errors.hpp"

using namespace mcubench;
using namespace mcubench::protocol;

namespace {

Command get_command(const ParsedLine& line) {
  REQUIRE(std::holds_alternative<Command>(line));
  return std::get<Command>(line);
}

Response get_response(const ParsedLine& line) {
  REQUIRE(std::holds_alternative<Response>(line));
  return std::get<Response>(line);
}

bool is_failure(const ParsedLine& line) {
  return std::holds_alternative<ParseFailure>(line);
}

std::string random_name(std::mt19937_64& rng) {
  static constexpr char kChars[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-";
  std::uniform_int_distribution<std::size_t> len(1, 24);
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kChars) - 2);
  std::string s(len(rng), 'x');
  for (char& c : s) c = kChars[pick(rng)];
  return s;
}

std::string random_detail(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(0, 32);
  std::uniform_int_distribution<int> pick(0x20, 0x7e);
  std::string s(len(rng), ' ');
  for (char& c : s) c = static_cast<char>(pick(rng));
  return s;
}

double random_finite(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> shape(0, 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  switch (shape(rng)) {
    case 0: return unit(rng);
    case 1: return unit(rng) * 1e9;
    case 2: return unit(rng) * 1e-9;
    default: return std::uniform_int_distribution<int>(-1000, 1000)(rng);
  }
}

Command random_command(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 7);
  switch (pick(rng)) {
    case 0: return NameCmd{};
    case 1: return TimestampCmd{};
    case 2: {
      LoadChunkCmd c;
      c.offset = std::uniform_int_distribution<std::uint64_t>(0, 1 << 20)(rng);
      std::uniform_int_distribution<std::size_t> len(1, kDefaultMaxChunk);
      std::uniform_int_distribution<int> byte(0, 255);
      c.payload.resize(len(rng));
      for (auto& b : c.payload) b = static_cast<std::uint8_t>(byte(rng));
      return c;
    }
    case 3:
      return LoadDoneCmd{std::uniform_int_distribution<std::uint64_t>(0, 1 << 24)(rng)};
    case 4: return SetTensorCmd{};
    case 5: {
      InferCmd c;
      c.iterations = std::uniform_int_distribution<std::uint64_t>(1, 1 << 20)(rng);
      c.warmup = std::uniform_int_distribution<std::uint64_t>(0, 100)(rng);
      return c;
    }
    case 6: return GetResultsCmd{};
    default:
      return SetModeCmd{std::bernoulli_distribution(0.5)(rng) ? Mode::kEnergy
                                                              : Mode::kPerformance};
  }
}

Response random_response(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 5);
  switch (pick(rng)) {
    case 0: return ReadyRsp{};
    case 1: return NameIsRsp{random_name(rng)};
    case 2:
      return TimestampIsRsp{
          std::uniform_int_distribution<std::int64_t>(0, std::int64_t{1} << 40)(rng)};
    case 3: return AckRsp{};
    case 4: {
      ResultTensorRsp r;
      std::uniform_int_distribution<std::size_t> len(0, 32);
      r.values.resize(len(rng));
      for (auto& v : r.values) v = random_finite(rng);
      return r;
    }
    default: {
      std::uniform_int_distribution<int> code(0, 5);
      return ErrorRsp{static_cast<ErrorCode>(code(rng)), random_detail(rng)};
    }
  }
}

}  // namespace

TEST_CASE("encode produces the documented keywords") {
  CHECK(encode(Command{TimestampCmd{}}) == "timestamp\n");
  CHECK(encode(Command{NameCmd{}}) == "name\n");
  CHECK(encode(Command{InferCmd{10, 3}}) == "infer 10 3\n");
  CHECK(encode(Command{LoadChunkCmd{0, {0xAB, 0xCD}}}) == "db 0 abcd\n");
  CHECK(encode(Command{LoadDoneCmd{5}}) == "db-done 5\n");
  CHECK(encode(Command{SetTensorCmd{}}) == "set-tensor\n");
  CHECK(encode(Command{GetResultsCmd{}}) == "results\n");
  CHECK(encode(Command{SetModeCmd{Mode::kPerformance}}) == "mode perf\n");
  CHECK(encode(Command{SetModeCmd{Mode::kEnergy}}) == "mode energy\n");

  CHECK(encode(Response{ReadyRsp{}}) == "m-ready\n");
  CHECK(encode(Response{NameIsRsp{"ref-dut"}}) == "m-name-ref-dut\n");
  CHECK(encode(Response{TimestampIsRsp{1234000}}) == "m-lap-us-1234000\n");
  CHECK(encode(Response{AckRsp{}}) == "m-ack\n");
  CHECK(encode(Response{ResultTensorRsp{{0.5, 0.25}}}) == "m-results-[0.5,0.25]\n");
  CHECK(encode(Response{ResultTensorRsp{{}}}) == "m-results-[]\n");
  CHECK(encode(Response{ErrorRsp{ErrorCode::kNotReady, ""}}) == "m-err-not-ready\n");
  CHECK(encode(Response{ErrorRsp{ErrorCode::kMalformed, "why"}}) ==
        "m-err-malformed why\n");
}

TEST_CASE("encode is deterministic") {
  Command cmd = InferCmd{42, 7};
  CHECK(encode(cmd) == encode(cmd));
}

TEST_CASE("encode rejects invariant violations") {
  CHECK_THROWS_AS(encode(Command{InferCmd{0, 0}}), ContractError);
  CHECK_THROWS_AS(encode(Command{LoadChunkCmd{0, {}}}), ContractError);
  CHECK_THROWS_AS(encode(Response{NameIsRsp{""}}), ContractError);
  CHECK_THROWS_AS(encode(Response{NameIsRsp{"has space"}}), ContractError);
  CHECK_THROWS_AS(encode(Response{ResultTensorRsp{{1.0, std::nan("")}}}),
                  ContractError);
}

TEST_CASE("parse inverts the documented examples") {
  CHECK(get_command(parse_line("timestamp\n")) == Command{TimestampCmd{}});
  CHECK(get_command(parse_line("infer 10 3")) == Command{InferCmd{10, 3}});
  CHECK(get_command(parse_line("db 0 abcd\n")) ==
        Command{LoadChunkCmd{0, {0xAB, 0xCD}}});
  CHECK(get_command(parse_line("mode energy\r\n")) ==
        Command{SetModeCmd{Mode::kEnergy}});
  CHECK(get_response(parse_line("m-lap-us-42\n")) == Response{TimestampIsRsp{42}});
  CHECK(get_response(parse_line("m-results-[1,0.5]\n")) ==
        Response{ResultTensorRsp{{1.0, 0.5}}});
}

TEST_CASE("parse rejects invariant and grammar violations") {
  CHECK(is_failure(parse_line("infer 0 0\n")));   // iterations >= 1
  CHECK(is_failure(parse_line("infer 10\n")));    // arity
  CHECK(is_failure(parse_line("db 0 abc\n")));    // odd hex
  CHECK(is_failure(parse_line("db 0 zz\n")));     // non-hex
  CHECK(is_failure(parse_line("launch\n")));      // unknown keyword
  CHECK(is_failure(parse_line("")));
  CHECK(is_failure(parse_line("m-lap-us-x\n")));
  CHECK(is_failure(parse_line("m-results-[1,,2]\n")));
  CHECK(is_failure(parse_line("m-results-[nan]\n")));
  CHECK(is_failure(parse_line("m-err-bogus\n")));
  CHECK(is_failure(parse_line("mode warp\n")));

  ParsedLine unknown = parse_line("launch\n");
  CHECK(std::get<ParseFailure>(unknown).unknown_keyword);
  ParsedLine arity = parse_line("infer 10\n");
  CHECK_FALSE(std::get<ParseFailure>(arity).unknown_keyword);
}

TEST_CASE("round-trip: parse(encode(m)) == m over random messages") {
  std::mt19937_64 rng(0x5eed);
  for (int i = 0; i < 5000; ++i) {
    Command cmd = random_command(rng);
    CAPTURE(encode(cmd));
    CHECK(get_command(parse_line(encode(cmd))) == cmd);
  }
  for (int i = 0; i < 5000; ++i) {
    Response rsp = random_response(rng);
    CAPTURE(encode(rsp));
    CHECK(get_response(parse_line(encode(rsp))) == rsp);
  }
}

TEST_CASE("parser survives arbitrary byte noise") {
  std::mt19937_64 rng(0xA0153);
  std::uniform_int_distribution<std::size_t> len(0, 80);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 10000; ++i) {
    std::string line(len(rng), '\0');
    for (char& c : line) c = static_cast<char>(byte(rng));
    ParsedLine parsed = parse_line(line);  // must not throw or crash
    (void)parsed;
  }
  // Structured near-misses.
  for (const char* s :
       {"db -1 ab", "db 0 ", "m-name-", "m-results-[", "m-err-",
        "timestamp extra", "mode", "db 18446744073709551615 ff"}) {
    CHECK(is_failure(parse_line(s)));
  }
  // Repeated separators are tolerated on the read side.
  CHECK(get_command(parse_line("infer  10  3")) == Command{InferCmd{10, 3}});
}

TEST_CASE("chunk_input covers the data exactly once") {
  SUBCASE("5 bytes with max_chunk 2 gives 2+2+1 then done") {
    auto cmds = chunk_input("abcde", 2);
    REQUIRE(cmds.size() == 4);
    auto c0 = std::get<LoadChunkCmd>(cmds[0]);
    auto c1 = std::get<LoadChunkCmd>(cmds[1]);
    auto c2 = std::get<LoadChunkCmd>(cmds[2]);
    CHECK(c0.offset == 0);
    CHECK(c0.payload.size() == 2);
    CHECK(c1.offset == 2);
    CHECK(c1.payload.size() == 2);
    CHECK(c2.offset == 4);
    CHECK(c2.payload.size() == 1);
    CHECK(std::get<LoadDoneCmd>(cmds[3]).total_len == 5);
  }
  SUBCASE("small input is a single chunk") {
    auto cmds = chunk_input("ab", 1024);
    REQUIRE(cmds.size() == 2);
    CHECK(std::get<LoadChunkCmd>(cmds[0]).payload.size() == 2);
    CHECK(std::get<LoadDoneCmd>(cmds[1]).total_len == 2);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(chunk_input("", 16), ContractError);
    CHECK_THROWS_AS(chunk_input("ab", 0), ContractError);
  }
  SUBCASE("reassembly is byte-exact up to 64 KiB") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (std::size_t size : {std::size_t{1}, std::size_t{511}, std::size_t{512},
                             std::size_t{513}, std::size_t{65536}}) {
      std::string data(size, '\0');
      for (char& c : data) c = static_cast<char>(byte(rng));
      std::uniform_int_distribution<std::size_t> chunk(1, 700);
      std::size_t max_chunk = chunk(rng);
      std::string rebuilt;
      std::uint64_t expected_offset = 0;
      auto cmds = chunk_input(data, max_chunk);
      for (std::size_t i = 0; i + 1 < cmds.size(); ++i) {
        auto c = std::get<LoadChunkCmd>(cmds[i]);
        CHECK(c.offset == expected_offset);
        CHECK(c.payload.size() <= max_chunk);
        rebuilt.append(reinterpret_cast<const char*>(c.payload.data()),
                       c.payload.size());
        expected_offset += c.payload.size();
      }
      CHECK(std::get<LoadDoneCmd>(cmds.back()).total_len == data.size());
      CHECK(rebuilt == data);
    }
  }
}

TEST_CASE("framing is insensitive to byte-stream split points") {
  std::mt19937_64 rng(99);
  std::vector<std::string> lines;
  std::string stream;
  for (int i = 0; i < 50; ++i) {
    std::string line = encode(random_command(rng));
    stream += line;
    line.pop_back();  // LineBuffer strips the terminator
    lines.push_back(line);
  }

  for (int trial = 0; trial < 20; ++trial) {
    LineBuffer framer;
    std::vector<std::string> got;
    std::size_t pos = 0;
    std::uniform_int_distribution<std::size_t> step(1, 13);
    while (pos < stream.size()) {
      std::size_t n = std::min(step(rng), stream.size() - pos);
      for (auto& l : framer.feed(std::string_view(stream).substr(pos, n)))
        got.push_back(l);
      pos += n;
    }
    CHECK(got == lines);
    CHECK_FALSE(framer.has_partial());
  }
}
