/* Copyright 2026 The MLPerf Authors. All Rights Reserved.
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

#ifndef RTBENCH_CLI_H_
#define RTBENCH_CLI_H_

#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rtbench/sut.h"

namespace rtbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

// `sim:<dist>:<params>[:options]` or `tcp:<host>:<port>`. Throws ConfigError
// (key "sut_endpoint") for anything else.
std::unique_ptr<SystemUnderTest> MakeSut(std::string_view endpoint);

// One row per profile, as printed by `list-profiles`.
std::string FormatProfileTable();

// The rtbench command line. `args` excludes the program name. Data goes to
// `out`, diagnostics to `err`. Returns kExitOk, kExitInvalid or kExitUsage.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace rtbench

#endif  // RTBENCH_CLI_H_
