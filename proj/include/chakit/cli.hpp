/*
 * Copyright 2026 The chakit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chakit {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_domain_error = 1,
    exit_usage = 2,
    exit_negative = 3,     // formula false, unrealizable, not a cover, strategy fails
    exit_unsupported = 4,  // synthesis fragment not supported
    exit_unverified = 5,   // strategy found but the closed system check failed
};

/// Runs one CLI invocation; `args` excludes the program name. Reports go to
/// `out`, diagnostics to `err`. `serve` blocks.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chakit
