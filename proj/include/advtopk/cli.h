// Copyright 2026 The advtopk Authors
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

#ifndef ADVTOPK_CLI_H_
#define ADVTOPK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace advtopk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad flag, bad parameter
inline constexpr int kExitRuntime = 2;  // numerical or runtime failure

// Runs one subcommand. `args` excludes the program name.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace advtopk

#endif  // ADVTOPK_CLI_H_
