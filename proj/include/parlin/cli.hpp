// Copyright 2026 The Parlin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>

namespace parlin {

/// Entry point of the `parlin` binary. Returns the process exit status:
/// 0 ok, 1 usage, 2 job/worker failure, 3 timeout, 4 I/O or schema error.
int cli_dispatch(int argc, const char* const* argv);

/// Routes logs to stderr at `level` (error, warn, info, debug). An empty level
/// falls back to $PARLIN_LOG, then info. Throws kUsage on other names.
void configure_logging(std::string_view level);

}  // namespace parlin
