// Copyright 2026 The FactArena Authors
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

// Command line dispatch for the factarena tool.

#ifndef FACTARENA_CLI_H_
#define FACTARENA_CLI_H_

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "factarena/common.h"

namespace factarena::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitProvider = 3;
inline constexpr int kExitIntegrity = 4;

int ExitCodeFor(ErrorCode code);

struct DispatchResult {
  int exit_code = kExitOk;
  // Chat calls that left the process (cache hits excluded).
  int64_t provider_calls = 0;
};

// `args` excludes the program name, e.g. {"run", "--config", "c.json"}.
DispatchResult Dispatch(const std::vector<std::string>& args,
                        std::ostream& out = std::cout,
                        std::ostream& err = std::cerr);

}  // namespace factarena::cli

#endif  // FACTARENA_CLI_H_
