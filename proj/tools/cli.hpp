// Copyright 2026 The toxicn Authors
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

#ifndef TOXICN_TOOLS_CLI_HPP_
#define TOXICN_TOOLS_CLI_HPP_

#include <iosfwd>

#include "toxicn/error.hpp"

namespace toxicn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheck = 3;

// An internal consistency check failed (for example a gradient check).
class CheckFailure : public Error {
 public:
  using Error::Error;
};

// Parses argv (argv[0] is the program name), runs the subcommand and maps
// failures to exit codes.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toxicn::cli

#endif  // TOXICN_TOOLS_CLI_HPP_
