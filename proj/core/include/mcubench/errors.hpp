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
#ifndef MCUBENCH_ERRORS_HPP_
#define MCUBENCH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mcubench {

/// Invalid arguments or violated preconditions (caller bug).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Wire-level failures: desync, unexpected responses, dead links.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// A measurement could not be taken or is unusable (missing triggers,
/// empty windows, empty stimuli sets).
class MeasurementError : public std::runtime_error {
 public:
  explicit MeasurementError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem and serialization failures in the results store.
class StoreError : public std::runtime_error {
 public:
  explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcubench

#endif  // MCUBENCH_ERRORS_HPP_
