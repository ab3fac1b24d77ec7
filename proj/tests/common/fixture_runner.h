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

#ifndef PROPSPAN_TESTS_COMMON_FIXTURE_RUNNER_H_
#define PROPSPAN_TESTS_COMMON_FIXTURE_RUNNER_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "propspan/cli.h"
#include "test_support.h"

namespace propspan::testing {

struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs every case under tests/fixtures/tc_rules through the tc subcommand
// and compares the written predictions with expected.tsv byte for byte.
inline std::vector<FixtureResult> RunTcRuleFixtures() {
  namespace fs = std::filesystem;
  const fs::path root = SourcePath("tests/fixtures/tc_rules");
  std::vector<fs::path> cases;
  for (const auto &entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) cases.push_back(entry.path());
  }
  std::sort(cases.begin(), cases.end());
  TempDir tmp;
  std::vector<FixtureResult> results;
  for (const fs::path &dir : cases) {
    FixtureResult r;
    r.name = dir.filename().string();
    const std::string out = tmp / (r.name + ".tsv");
    std::vector<std::string> args = {"--techniques", (root / "techniques.txt").string(), "tc",
                                      "--articles", (dir / "articles").string(),
                                      "--rows", (dir / "rows.tsv").string(),
                                      "--probs", (dir / "probs.jsonl").string(),
                                      "--out", out};
    if (fs::exists(dir / "memory.tsv")) {
      args.insert(args.end(), {"--memory", (dir / "memory.tsv").string()});
    }
    if (fs::exists(dir / "nesting.tsv")) {
      args.insert(args.end(), {"--nesting", (dir / "nesting.tsv").string()});
    }
    std::istringstream flags(ReadAll((dir / "flags").string()));
    for (std::string flag; std::getline(flags, flag);) {
      if (!flag.empty()) args.push_back(flag);
    }
    std::ostringstream sout, serr;
    const int code = RunCli(args, sout, serr);
    if (code != 0) {
      r.detail = "exit " + std::to_string(code) + ": " + serr.str();
    } else {
      const std::string got = ReadAll(out);
      const std::string want = ReadAll((dir / "expected.tsv").string());
      r.passed = got == want;
      if (!r.passed) r.detail = "got:\n" + got + "want:\n" + want;
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace propspan::testing

#endif  // PROPSPAN_TESTS_COMMON_FIXTURE_RUNNER_H_
