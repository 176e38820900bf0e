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
#ifndef MCUBENCH_NUMFMT_HPP_
#define MCUBENCH_NUMFMT_HPP_

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace mcubench::numfmt {

// Shortest decimal form that parses back to the identical bits. All persisted
// and wire-encoded reals go through this so that re-scoring stored raw data
// reproduces scores bit-for-bit.
inline std::string format_double(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline bool parse_double(std::string_view tok, double& out) {
  if (tok.empty()) return false;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

inline bool parse_u64(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out, 10);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

inline bool parse_i64(std::string_view tok, std::int64_t& out) {
  if (tok.empty()) return false;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), out, 10);
  return r.ec == std::errc{} && r.ptr == tok.data() + tok.size();
}

}  // namespace mcubench::numfmt

#endif  // MCUBENCH_NUMFMT_HPP_
