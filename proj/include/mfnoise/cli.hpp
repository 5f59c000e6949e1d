// Copyright 2026 The mfnoise Authors. All Rights Reserved.
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

#ifndef MFNOISE_CLI_HPP_
#define MFNOISE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace mfnoise {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitVerification = 3,
};

// Entry point behind the mfnoise binary. `args` excludes the program name.
// Subcommands: run, sweep, landscape, phase, verify, list-presets.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfnoise

#endif  // MFNOISE_CLI_HPP_
