// Copyright 2026 The propspan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROPSPAN_SRC_JSONL_H_
#define PROPSPAN_SRC_JSONL_H_

#include <cmath>
#include <istream>
#include <string>

#include "json.hpp"
#include "propspan/errors.h"

namespace propspan {

// Calls fn(record, line_number) for each non-blank line of a JSON-lines
// stream; syntax errors become FormatError with the line number.
template <typename Fn>
void ForEachJsonLine(std::istream &in, const std::string &what, Fn &&fn) {
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw FormatError(Located(what, number, std::string("invalid JSON: ") + e.what()));
    }
    if (!record.is_object()) {
      throw FormatError(Located(what, number, "record must be a JSON object"));
    }
    fn(record, number);
  }
}

inline const nlohmann::json &RequireField(const nlohmann::json &record,
                                          const char *field,
                                          const std::string &what, size_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw FormatError(Located(what, line, std::string("missing field '") + field + "'"));
  }
  return *it;
}

inline size_t RequireOffset(const nlohmann::json &v, const std::string &what,
                            size_t line) {
  if (!v.is_number_unsigned()) {
    throw FormatError(Located(what, line, "offsets must be non-negative integers"));
  }
  return v.get<size_t>();
}

inline double RequireFinite(const nlohmann::json &v, const std::string &what,
                            size_t line) {
  if (!v.is_number()) throw FormatError(Located(what, line, "expected a number"));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(Located(what, line, "non-finite number"));
  return d;
}

}  // namespace propspan

#endif  // PROPSPAN_SRC_JSONL_H_
