// Copyright 2026 The SFS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFS_TOOLS_CLI_HPP_
#define SFS_TOOLS_CLI_HPP_

#include <ostream>

namespace sfs::cli {

// Exit codes. Errors also print one JSON object on the error stream.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kConfig = 4,
  kUnknownTarget = 5,
  kDomain = 6,
  kUnsupported = 7,
  kDriftSingularity = 8,
  kNonFinite = 9,
};

// Parses argv and runs one subcommand: sample, drift-check, sweep,
// compare or regularity. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfs::cli

#endif  // SFS_TOOLS_CLI_HPP_
