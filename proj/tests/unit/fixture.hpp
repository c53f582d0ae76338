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

#include <array>

#include "fanocirc/device.hpp"

namespace fixture {

// Fitted chip.
inline fanocirc::DeviceParams fitted() {
  fanocirc::DeviceParams p;
  p.e_c_sigma_ghz = 3.09;
  p.e_j_ghz = {14.73, 15.15, 15.22};
  p.c_x_ff = 76.0;
  p.gamma_ghz = 0.27;
  return p;
}

inline fanocirc::DeviceParams symmetric() {
  fanocirc::DeviceParams p;
  p.e_j_ghz = {15.03, 15.03, 15.03};
  return p;
}

// Clockwise optimum of the fitted chip found by the default optimizer.
inline constexpr double kPhiOpt = 3.518722258080232;
inline constexpr std::array<double, 3> kNgOpt{1.01945962264241, 1.5895433145219815, 0.0};
inline constexpr double kFOpt = 7.278465667046631;

inline fanocirc::BiasPoint operating_bias() {
  return {kPhiOpt, kNgOpt};
}

}  // namespace fixture
