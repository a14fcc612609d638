// Copyright 2026 The nvqoc Authors
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

// Batch commands: simulate, optimize, sense, limits.
//
// Each command turns a parsed configuration into a set of named output
// files. Nothing touches the disk until a command has succeeded, so failed
// runs leave no partial output behind.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nvqoc_cli/config.hpp"

namespace nvqoc::cli {

enum class Command { simulate, optimize, sense, limits };

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;      // I/O and other unexpected errors
inline constexpr int kExitConfig = 2;       // unreadable or invalid configuration
inline constexpr int kExitNumeric = 3;      // numerical failure during the run
inline constexpr int kExitUnsupported = 4;  // unsupported combination of options

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::string summary;  // human-readable lines for stdout
};

/// Runs `cmd` on a parsed document. `doc` is echoed into the report with the
/// effective seed, so re-running the echoed configuration reproduces the
/// report byte for byte.
CommandResult execute(Command cmd, const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// "%.17g": round-trips every double.
std::string format_double(double x);

/// Entry point of the nvqoc executable; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvqoc::cli
