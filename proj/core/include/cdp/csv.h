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

#ifndef CDP_CORE_CSV_H_
#define CDP_CORE_CSV_H_

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace cdp {

// Minimal comma-separated table: a header row plus data rows. Fields are
// trimmed; double-quoted fields may contain commas. Blank lines and lines
// starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int Column(std::string_view name) const;
};

// InvalidArgument ("ParseError") on ragged rows or a missing header.
absl::StatusOr<CsvTable> ReadCsv(std::istream& in);
absl::StatusOr<CsvTable> ReadCsvFile(const std::string& path);

absl::StatusOr<double> ParseDouble(std::string_view field);

}  // namespace cdp

#endif  // CDP_CORE_CSV_H_
