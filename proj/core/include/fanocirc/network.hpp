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

// Six-port scattering of three waveguides joined by shunt capacitors C_X,
// each also coupled through C~_C to an interior port facing the junction
// loop. Ports 0..2 are exterior, 3..5 interior.

#include "fanocirc/device.hpp"
#include "fanocirc/types.hpp"

namespace fanocirc {

/// Full 6x6 capacitance matrix in fF,
///   [[C_X - C_Sigma, C_C], [C_C, -C_C]]
/// with C_Sigma = (C~_C + 2 C_X) 1, C_C = C~_C 1 and C_X hollow.
struct CapacitanceMatrix {
  Matrix6d c = Matrix6d::Zero();
};

CapacitanceMatrix build_capacitance_matrix(double c_x_ff, double c_c_tilde_ff);

struct WaveguideScattering {
  Matrix6c a = Matrix6c::Identity();
  /// Dimensionless shunt coupling 2*pi*f*Z_wg*C_X.
  double z = 0.0;
  /// 1-norm condition number of the resolvent 1 + i w Z C (1 for the limit).
  double condition = 1.0;

  [[nodiscard]] Matrix3c a11() const { return a.topLeftCorner<3, 3>(); }
  [[nodiscard]] Matrix3c a12() const { return a.topRightCorner<3, 3>(); }
  [[nodiscard]] Matrix3c a21() const { return a.bottomLeftCorner<3, 3>(); }
  [[nodiscard]] Matrix3c a22() const { return a.bottomRightCorner<3, 3>(); }
};

/// z = 2*pi*f*Z_wg*C_X with f in GHz, Z in ohm, C in fF. f is an ordinary
/// frequency; the 2*pi makes z(7.25 GHz, 50 ohm, 75 fF) ~= 0.171.
double shunt_coupling(double f_ghz, double z_wg_ohm, double c_x_ff);

/// Cayley transform A = (1 + i w Z C)^{-1} (1 - i w Z C). Throws SolverError
/// when the resolvent condition number exceeds `max_condition`.
WaveguideScattering waveguide_smatrix_finite(double f_ghz, double z_wg_ohm,
                                             const CapacitanceMatrix& c,
                                             double max_condition = 1e13);

/// Closed form in the galvanic limit C~_C -> infinity.
WaveguideScattering waveguide_smatrix_limit(double z);

/// Chooses the finite or limiting form from `params.c_c_tilde_ff`.
WaveguideScattering waveguide_smatrix(const DeviceParams& params, double f_ghz);

}  // namespace fanocirc
