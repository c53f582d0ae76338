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

#include "fanocirc/analysis.hpp"
#include "fanocirc/device.hpp"

namespace fanocirc {

struct RunConfig {
  DeviceParams device;
  BiasPoint bias;
  int sector = 0;
  std::vector<int> spectrum_sectors{0, 1, 2, 3};
  bool gamma_is_angular = false;
  Direction direction = Direction::kClockwise;
  /// "adiabatic" or "full" for smatrix and fidelity sweeps.
  ScatteringMethod method = ScatteringMethod::kAdiabatic;
  /// Replace the configured bias and drive frequency by optimize_bias.
  bool auto_bias = false;

  double f_min_ghz = 7.0;
  double f_max_ghz = 7.5;
  double f_step_mhz = 2.0;
  /// Single drive frequency for the power sweep.
  double f_drive_ghz = 7.46;
  std::vector<double> power_dbm;

  double flux_min = 0.0;
  double flux_max = kTwoPi;
  int flux_points = 181;

  std::vector<double> spread_delta{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<double> spread_c_x_ff{0.0, 75.0, 150.0};

  int opt_starts = 8;
  int opt_max_evals = 600;
  std::uint64_t seed = 1;

  std::string out_dir = "out";

  [[nodiscard]] RateConvention rates() const { return {gamma_is_angular}; }
  [[nodiscard]] OptimizerOptions optimizer() const;
  void validate() const;
};

/// Documented keys, in file order.
const std::vector<std::string>& config_keys();

/// Flat key-value document with optional [section] headers (sections only
/// group keys). Lines starting with '#' or ';' are comments.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Apply one "key=value" override on top of a loaded config.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Resolved config in the same format parse_config reads.
std::string config_to_text(const RunConfig& cfg);

}  // namespace fanocirc
