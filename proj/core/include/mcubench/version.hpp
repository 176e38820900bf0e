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
#ifndef MCUBENCH_VERSION_HPP_
#define MCUBENCH_VERSION_HPP_

namespace mcubench {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kResultsSchemaVersion = 1;

}  // namespace mcubench

#endif  // MCUBENCH_VERSION_HPP_
