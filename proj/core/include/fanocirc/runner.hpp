// Copyright 2026 The fanocirc Authors
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


#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fanocirc/config.hpp"

namespace fanocirc {

std::string version();

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"spectrum",     "smatrix",     "fidelity",
                                                 "optimize",     "spread-sweep", "power-sweep",
                                                 "selftest"};
  return names;
}

struct ResultRecord {
  std::string subcommand;
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string timestamp;
  /// CSV payload exactly as written.
  std::string csv;
  /// JSON summary exactly as written.
  std::string json;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  std::vector<std::string> warnings;
  /// False when the subcommand ran but reported failed checks (selftest).
  bool ok = true;
};

/// 64-bit FNV-1a of the resolved config text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Full-precision scientific rendering, independent of the global locale.
std::string format_number(double v);

/// Runs one subcommand and writes <out_dir>/<name>.csv and <name>.json.
/// Throws ValidationError or SolverError.
ResultRecord run_subcommand(const std::string& name, const RunConfig& cfg);

/// First two lines (schema tag and column header) of each CSV kind.
std::string csv_header(const std::string& name, int n_levels = 5);

}  // namespace fanocirc
