// Copyright 2026 The valuedec Authors.
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


#ifndef VALUEDEC_TOOLS_CLI_H_
#define VALUEDEC_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace valuedec::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // the command itself failed
inline constexpr int kExitUsage = 2;    // bad flags or config

// Runs one `valuedec` invocation. `args` excludes the program name. Normal
// output goes to `out`; failures are reported on `err` as a single JSON
// object {"error": {"kind", "message", ...}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace valuedec::cli

#endif  // VALUEDEC_TOOLS_CLI_H_
