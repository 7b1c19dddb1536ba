// Copyright 2026 The Permanent Engine Authors
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

#pragma once

#include <iosfwd>

namespace perm::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    ok = 0,
    failure = 1,
    parse_error = 2,
    unsupported_order = 3,
    invalid_arguments = 4,
};

/// Runs the tool with the given arguments; argv[0] is the program name.
/// JSON results go to `out`, diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace perm::cli
