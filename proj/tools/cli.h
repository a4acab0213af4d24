// Copyright 2026 The prtriage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRTRIAGE_TOOLS_CLI_H_
#define PRTRIAGE_TOOLS_CLI_H_

#include <ostream>

namespace prtriage::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitIo = 2,
  kExitUsage = 3,
  kExitSchemaMismatch = 4,
  kExitData = 5,
  kExitForge = 6,
};

// Runs one subcommand. Failures print a single line
//   error kind=<kind> exit=<code> detail=<message>
// to `err` and return the matching exit code.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prtriage::cli

#endif  // PRTRIAGE_TOOLS_CLI_H_
