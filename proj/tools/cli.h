/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SNAPGAP_TOOLS_CLI_H_
#define SNAPGAP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace snapgap::cli {

// Runs one command line (args[0] is the program name). Returns the process
// exit code: 0 success, 2 validation, 3 insufficient cohort, 4 I/O.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snapgap::cli

#endif  // SNAPGAP_TOOLS_CLI_H_
