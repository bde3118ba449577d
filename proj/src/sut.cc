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

#include "rtbench/sut.h"

namespace rtbench {

std::string_view ToString(SubmissionCategory c) {
  switch (c) {
    case SubmissionCategory::kHardenedSystem:
      return "hardened_system";
    case SubmissionCategory::kDevelopmentSystem:
      return "development_system";
    case SubmissionCategory::kEngineeringSample:
      return "engineering_sample";
  }
  return "unknown";
}

std::optional<SubmissionCategory> ParseCategory(std::string_view s) {
  if (s == "hardened_system") return SubmissionCategory::kHardenedSystem;
  if (s == "development_system") return SubmissionCategory::kDevelopmentSystem;
  if (s == "engineering_sample") return SubmissionCategory::kEngineeringSample;
  return std::nullopt;
}

std::vector<std::string> CategoryViolations(const SutDescriptor& sut) {
  bool safety = false, available = false, auditable = false;
  switch (sut.category) {
    case SubmissionCategory::kHardenedSystem:
      safety = available = auditable = true;
      break;
    case SubmissionCategory::kDevelopmentSystem:
      available = auditable = true;
      break;
    case SubmissionCategory::kEngineeringSample:
      break;
  }
  std::vector<std::string> out;
  auto check = [&](const char* field, bool actual, bool required) {
    if (actual != required) {
      out.push_back(std::string(ToString(sut.category)) + " requires " + field +
                    "=" + (required ? "true" : "false"));
    }
  };
  check("functional_safety", sut.functional_safety, safety);
  check("publicly_available", sut.publicly_available, available);
  check("auditable_closed", sut.auditable_closed, auditable);
  return out;
}

}  // namespace rtbench
