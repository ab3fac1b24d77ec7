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

#ifndef PROPSPAN_ERRORS_H_
#define PROPSPAN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace propspan {

// Exception hierarchy. The command-line front end maps these onto exit
// codes: UsageError -> 1, IoError/FormatError/ConfigError -> 2,
// NumericalError -> 3. ContractViolation signals a programming error in the
// caller and is never expected from well-formed inputs.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Builds "file:line: message" diagnostics.
inline std::string Located(const std::string &file, size_t line,
                           const std::string &message) {
  return file + ":" + std::to_string(line) + ": " + message;
}

}  // namespace propspan

#endif  // PROPSPAN_ERRORS_H_
