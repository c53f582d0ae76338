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

#include "fanocirc/network.hpp"

#include <cmath>
#include <sstream>

namespace fanocirc {

CapacitanceMatrix build_capacitance_matrix(double c_x_ff, double c_c_tilde_ff) {
  if (c_x_ff < 0.0) throw ValidationError("c_x_ff must be non-negative");
  if (!(c_c_tilde_ff > 0.0)) throw ValidationError("c_c_tilde_ff must be strictly positive");
  Eigen::Matrix3d cx = Eigen::Matrix3d::Constant(c_x_ff);
  cx.diagonal().setZero();
  const Eigen::Matrix3d c_sigma = (c_c_tilde_ff + 2.0 * c_x_ff) * Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d c_c = c_c_tilde_ff * Eigen::Matrix3d::Identity();

  CapacitanceMatrix out;
  out.c.topLeftCorner<3, 3>() = cx - c_sigma;
  out.c.topRightCorner<3, 3>() = c_c;
  out.c.bottomLeftCorner<3, 3>() = c_c;
  out.c.bottomRightCorner<3, 3>() = -c_c;
  return out;
}

double shunt_coupling(double f_ghz, double z_wg_ohm, double c_x_ff) {
  return kTwoPi * f_ghz * 1e9 * z_wg_ohm * c_x_ff * 1e-15;
}

WaveguideScattering waveguide_smatrix_finite(double f_ghz, double z_wg_ohm,
                                             const CapacitanceMatrix& c, double max_condition) {
  // Angular frequency in rad/s times ohm times farad.
  const double scale = kTwoPi * f_ghz * 1e9 * z_wg_ohm * 1e-15;
  const Matrix6c gen = kI * scale * c.c.cast<cplx>();
  const Matrix6c plus = Matrix6c::Identity() + gen;
  const Matrix6c minus = Matrix6c::Identity() - gen;

  const Eigen::PartialPivLU<Matrix6c> lu(plus);
  WaveguideScattering out;
  out.condition = 1.0 / lu.rcond();
  if (!std::isfinite(out.condition) || out.condition > max_condition) {
    std::ostringstream msg;
    msg << "waveguide resolvent is near-singular at f=" << f_ghz
        << " GHz (condition estimate " << out.condition << ")";
    throw SolverError(msg.str());
  }
  out.a = lu.solve(minus);
  // z is defined by the shunt value, which sits on the exterior off-diagonal.
  out.z = scale * c.c(0, 1);
  return out;
}

WaveguideScattering waveguide_smatrix_limit(double z) {
  if (z < 0.0 || !std::isfinite(z)) throw ValidationError("shunt coupling z must be >= 0");
  const cplx denom = 2.0 * kI + 3.0 * z;
  const cplx pref = z / denom;
  // Diagonal of A12: pref * (1 + 2i/z) = (z + 2i)/(2i + 3z), finite at z = 0.
  const cplx diag12 = (z + 2.0 * kI) / denom;

  Matrix3c a11 = Matrix3c::Constant(pref);
  a11.diagonal().setConstant(-2.0 * pref);
  Matrix3c a12 = Matrix3c::Constant(pref);
  a12.diagonal().setConstant(diag12);

  WaveguideScattering out;
  out.z = z;
  out.a.topLeftCorner<3, 3>() = a11;
  out.a.bottomRightCorner<3, 3>() = a11;
  out.a.topRightCorner<3, 3>() = a12;
  out.a.bottomLeftCorner<3, 3>() = a12;
  return out;
}

WaveguideScattering waveguide_smatrix(const DeviceParams& params, double f_ghz) {
  if (params.c_c_tilde_ff) {
    return waveguide_smatrix_finite(f_ghz, params.z_wg_ohm,
                                    build_capacitance_matrix(params.c_x_ff, *params.c_c_tilde_ff));
  }
  return waveguide_smatrix_limit(shunt_coupling(f_ghz, params.z_wg_ohm, params.c_x_ff));
}

}  // namespace fanocirc
