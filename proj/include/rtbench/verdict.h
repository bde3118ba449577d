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

#ifndef RTBENCH_VERDICT_H_
#define RTBENCH_VERDICT_H_

#include <map>
#include <string>

namespace rtbench {

// Outcome of one compliance test. `evidence` holds every measurement needed
// to recompute `passed` (see RecomputeVerdict in compliance.h).
struct ComplianceVerdict {
  std::string test_name;
  bool passed = false;
  std::map<std::string, double> evidence;

  bool operator==(const ComplianceVerdict&) const = default;
};

}  // namespace rtbench

#endif  // RTBENCH_VERDICT_H_
