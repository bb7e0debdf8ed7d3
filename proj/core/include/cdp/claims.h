//
// Copyright 2026 The cdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CDP_CORE_CLAIMS_H_
#define CDP_CORE_CLAIMS_H_

// A self-contained battery of numerical checks of the library's headline
// results, used by `cdp verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace cdp {

struct ClaimResult {
  std::string id;
  std::string description;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Reported claims are informative only and never fail the suite.
  bool reported_only = false;
  std::string detail;
};

struct ClaimSuiteOptions {
  uint64_t seed = 20240501;
  int64_t draws = 200000;  // Monte Carlo draws per sampling check
};

std::vector<ClaimResult> RunClaimSuite(const ClaimSuiteOptions& options = {});
// {"claims": {id: {...}}, "all_pass": bool}
std::string ClaimsToJson(const std::vector<ClaimResult>& claims);

}  // namespace cdp

#endif  // CDP_CORE_CLAIMS_H_
