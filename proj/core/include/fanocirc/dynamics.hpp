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

// Rotating-frame master equation for the loop, its steady state, and the
// device scattering matrix obtained from it (full) or from adiabatic
// elimination of the excited manifold (weak drive).

#include <optional>
#include <string>
#include <vector>

#include "fanocirc/device.hpp"
#include "fanocirc/network.hpp"
#include "fanocirc/slh.hpp"
#include "fanocirc/types.hpp"

namespace fanocirc {

/// Unit handling for the master equation. Hamiltonian frequencies (GHz) are
/// always multiplied by 2*pi. Rates built from Gamma (dissipators, H_s, H_d)
/// are multiplied by 2*pi when Gamma is an ordinary rate and left alone
/// when it is already angular. Time is in ns.
struct RateConvention {
  bool gamma_is_angular = false;

  [[nodiscard]] double hamiltonian_scale() const { return kTwoPi; }
  [[nodiscard]] double rate_scale() const { return gamma_is_angular ? 1.0 : kTwoPi; }
};

/// Superoperator on column-stacked vec(rho), d^2 x d^2.
struct Liouvillian {
  MatrixXc matrix;
  int dim = 0;
  double omega_d_ghz = 0.0;
  Vector3c alpha = Vector3c::Zero();

  [[nodiscard]] MatrixXc apply(const MatrixXc& rho) const;
};

/// -i[H'_tot, rho] + sum_j D[L_tot,j] rho in units of 1/ns.
Liouvillian build_liouvillian(const ComposedSystem& cs, double omega_d_ghz,
                              const RateConvention& rates = {});

struct SteadyState {
  MatrixXc rho;
  /// ||L vec(rho)||_2.
  double residual = 0.0;
  /// Reciprocal condition estimate of the bordered system.
  double rcond = 0.0;
  double min_eigenvalue = 0.0;
};

/// Kernel of the Liouvillian with Tr(rho) = 1 imposed through a bordered
/// solve. Throws SolverError if the kernel is not one-dimensional or the
/// residual exceeds 1e-10.
SteadyState steady_state(const Liouvillian& lv);

/// Classical fourth-order Runge-Kutta from rho0 to t_final (ns). Requires
/// dt * (spectral radius of L) < 0.1.
MatrixXc evolve(const Liouvillian& lv, const MatrixXc& rho0, double t_final_ns, double dt_ns);

/// Largest |eigenvalue| of the superoperator, 1/ns.
double spectral_radius(const Liouvillian& lv);

enum class ScatteringMethod { kFull, kAdiabatic };

struct ScatteringMatrix {
  /// S(j, i) = <a_out,j> / alpha_i.
  Matrix3c s = Matrix3c::Identity();
  double omega_d_ghz = 0.0;
  ScatteringMethod method = ScatteringMethod::kAdiabatic;
  /// Drive amplitude used per port, sqrt(GHz); zero for the adiabatic path.
  double drive_amplitude = 0.0;
  /// Largest 1 - rho_00 over the three port solves.
  double max_excited_population = 0.0;
  std::vector<std::string> warnings;
};

struct DriveOptions {
  /// Fixed per-port drive amplitude in sqrt(GHz). When unset, the amplitude
  /// is chosen so that the predicted excited population is
  /// `target_population`.
  std::optional<double> alpha_mag;
  double target_population = 1e-7;
  RateConvention rates;
};

/// Waveguide block + loop couplings at drive frequency f for drive `alpha`.
ComposedSystem compose_device(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                              const Vector3c& alpha);

ScatteringMatrix smatrix_full(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                              const DriveOptions& drive = {});
ScatteringMatrix smatrix_full(const DeviceParams& params, const BiasPoint& bias,
                              const QuasiparticleSector& sector, double f_ghz,
                              const DriveOptions& drive = {});

enum class LoopResponseForm {
  /// Exact weak-drive response: inverse of the full non-Hermitian effective
  /// Hamiltonian on the excited manifold.
  kResolvent,
  /// Sum over levels with only the diagonal rates Gamma_k kept.
  kPerLevel,
};

struct LoopResponse {
  Matrix3c r = Matrix3c::Zero();
  /// Complex decay/shift rate of each excited level (index 0 unused), 1/ns.
  VectorXc gamma_k;
  /// 2*pi (omega_k - omega_d), rad/ns (index 0 unused).
  Eigen::VectorXd detuning;
};

LoopResponse loop_response(const EigenSystem& es, const ComposedSystem& cs, double f_ghz,
                           const RateConvention& rates = {},
                           LoopResponseForm form = LoopResponseForm::kResolvent);

/// Excited-state population per unit |alpha|^2 when driving port i alone,
/// predicted by linear response.
Eigen::Vector3d linear_response_population(const EigenSystem& es, const ComposedSystem& cs,
                                           double f_ghz, const RateConvention& rates = {});

ScatteringMatrix smatrix_adiabatic(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                                   const RateConvention& rates = {},
                                   LoopResponseForm form = LoopResponseForm::kResolvent);
ScatteringMatrix smatrix_adiabatic(const DeviceParams& params, const BiasPoint& bias,
                                   const QuasiparticleSector& sector, double f_ghz,
                                   const RateConvention& rates = {});

}  // namespace fanocirc
