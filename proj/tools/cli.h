/*
Copyright 2026 The reverbkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef REVERBKIT_TOOLS_CLI_H_
#define REVERBKIT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace reverbkit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
// Unknown subcommand, unknown flag, missing or malformed flag value.
inline constexpr int kExitUsage = 2;
// Config documents or parameters rejected by the library.
inline constexpr int kExitInvalidConfig = 3;
// Missing input, unreadable or corrupt file, failed write.
inline constexpr int kExitIo = 4;

// Runs one command line. `args` excludes the program name. Normal output
// goes to `out`; failures print one JSON object on a single line to `err`:
//   {"error": {"code": ..., "message": ...}, "exit_code": n}
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reverbkit::cli

#endif  // REVERBKIT_TOOLS_CLI_H_
