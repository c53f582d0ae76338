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


#include <algorithm>
#include <cmath>
#include <sstream>

#include "fanocirc/dynamics.hpp"

namespace fanocirc {

namespace {

// Excited-manifold blocks shared by the linear-response formulas.
struct ExcitedBlock {
  // i*H_eff on levels 1..d-1, rad/ns.
  MatrixXc ih_eff;
  // Row i holds <0|L_wl,i|k> for k >= 1, sqrt(GHz).
  Eigen::Matrix<cplx, 3, Eigen::Dynamic> u;
  Eigen::VectorXd detuning;
  VectorXc gamma_k;
};

ExcitedBlock excited_block(const EigenSystem& es, const ComposedSystem& cs, double f_ghz,
                           const RateConvention& rates) {
  const int d = cs.dim();
  const int m = d - 1;
  const double hs = rates.hamiltonian_scale();
  const double rs = rates.rate_scale();

  // L^dag (1 + 2 A_s) L == 2i H_s + sum_i L_wl,i^dag L_wl,i.
  MatrixXc g = 2.0 * kI * cs.h_s;
  for (const auto& l : cs.l_wl) g += l.adjoint() * l;
  g *= rs;

  ExcitedBlock b;
  b.detuning = Eigen::VectorXd::Zero(d);
  b.gamma_k = VectorXc::Zero(d);
  for (int k = 1; k < d; ++k) {
    b.detuning(k) = hs * (es.omega(k) - f_ghz);
    b.gamma_k(k) = g(k, k);
  }
  b.ih_eff = 0.5 * g.bottomRightCorner(m, m);
  b.ih_eff.diagonal() += kI * b.detuning.tail(m).cast<cplx>();
  b.u.resize(3, m);
  for (int i = 0; i < 3; ++i) b.u.row(i) = cs.l_wl[i].row(0).tail(m);
  return b;
}

bool loop_decoupled(const ComposedSystem& cs) {
  return std::all_of(cs.l_loop.begin(), cs.l_loop.end(),
                     [](const MatrixXc& l) { return l.cwiseAbs().maxCoeff() == 0.0; });
}

}  // namespace

ComposedSystem compose_device(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                              const Vector3c& alpha) {
  const int d = es.n_levels();
  MatrixXc h_rot = MatrixXc::Zero(d, d);
  // Ground state is the rotating-frame reference; only excited levels shift.
  for (int k = 1; k < d; ++k) h_rot(k, k) = es.omega(k) - f_ghz;
  return compose_circulator(waveguide_smatrix(params, f_ghz),
                            coupling_operators(es, params.gamma_ghz), h_rot, alpha);
}

LoopResponse loop_response(const EigenSystem& es, const ComposedSystem& cs, double f_ghz,
                           const RateConvention& rates, LoopResponseForm form) {
  const ExcitedBlock b = excited_block(es, cs, f_ghz, rates);
  const double rs = rates.rate_scale();
  LoopResponse out;
  out.detuning = b.detuning;
  out.gamma_k = b.gamma_k;
  if (b.u.cols() == 0) return out;

  if (form == LoopResponseForm::kResolvent) {
    const Eigen::PartialPivLU<MatrixXc> lu(b.ih_eff);
    const MatrixXc x = lu.solve(MatrixXc(b.u.adjoint()));
    out.r = -rs * b.u * x;
  } else {
    for (int k = 0; k < b.u.cols(); ++k) {
      const cplx denom = kI * b.detuning(k + 1) + 0.5 * b.gamma_k(k + 1);
      out.r += (-rs / denom) * b.u.col(k) * b.u.col(k).adjoint();
    }
  }
  return out;
}

Eigen::Vector3d linear_response_population(const EigenSystem& es, const ComposedSystem& cs,
                                           double f_ghz, const RateConvention& rates) {
  const ExcitedBlock b = excited_block(es, cs, f_ghz, rates);
  const double rs = rates.rate_scale();
  Eigen::Vector3d pop = Eigen::Vector3d::Zero();
  if (b.u.cols() == 0) return pop;
  const Eigen::PartialPivLU<MatrixXc> lu(b.ih_eff);
  for (int port = 0; port < 3; ++port) {
    const Vector3c beta = cs.s_wl.col(port);
    const VectorXc psi = -rs * lu.solve(VectorXc(b.u.adjoint() * beta));
    pop(port) = psi.squaredNorm();
  }
  return pop;
}

ScatteringMatrix smatrix_full(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                              const DriveOptions& drive) {
  ScatteringMatrix out;
  out.omega_d_ghz = f_ghz;
  out.method = ScatteringMethod::kFull;
  out.warnings = es.warnings;

  const ComposedSystem base = compose_device(es, params, f_ghz, Vector3c::Zero());
  if (loop_decoupled(base)) {
    out.s = base.s_wl;
    return out;
  }

  double amp = 0.0;
  if (drive.alpha_mag) {
    amp = *drive.alpha_mag;
    if (!(amp > 0.0)) throw ValidationError("alpha_mag must be positive");
  } else {
    if (!(drive.target_population > 0.0 && drive.target_population < 1.0)) {
      throw ValidationError("target_population must lie in (0, 1)");
    }
    const double worst = linear_response_population(es, base, f_ghz, drive.rates).maxCoeff();
    amp = worst > 0.0 ? std::sqrt(drive.target_population / worst) : 1.0;
  }
  out.drive_amplitude = amp;

  for (int port = 0; port < 3; ++port) {
    Vector3c alpha = Vector3c::Zero();
    alpha(port) = amp;
    const ComposedSystem cs = compose_device(es, params, f_ghz, alpha);
    const SteadyState ss = steady_state(build_liouvillian(cs, f_ghz, drive.rates));
    out.max_excited_population =
        std::max(out.max_excited_population, 1.0 - ss.rho(0, 0).real());
    // Tr(L_tot,j rho) / alpha with the constant S_wl alpha part taken exactly.
    for (int j = 0; j < 3; ++j) {
      out.s(j, port) = cs.s_wl(j, port) + (cs.l_wl[j] * ss.rho).trace() / amp;
    }
  }
  if (out.max_excited_population > 0.01) {
    std::ostringstream msg;
    msg << "drive too strong for linear response at " << f_ghz
        << " GHz: ground population " << 1.0 - out.max_excited_population;
    out.warnings.push_back(msg.str());
  }
  return out;
}

ScatteringMatrix smatrix_full(const DeviceParams& params, const BiasPoint& bias,
                              const QuasiparticleSector& sector, double f_ghz,
                              const DriveOptions& drive) {
  return smatrix_full(solve_loop(params, bias, sector), params, f_ghz, drive);
}

ScatteringMatrix smatrix_adiabatic(const EigenSystem& es, const DeviceParams& params, double f_ghz,
                                   const RateConvention& rates, LoopResponseForm form) {
  const ComposedSystem cs = compose_device(es, params, f_ghz, Vector3c::Zero());
  ScatteringMatrix out;
  out.omega_d_ghz = f_ghz;
  out.method = ScatteringMethod::kAdiabatic;
  out.warnings = es.warnings;
  const LoopResponse lr = loop_response(es, cs, f_ghz, rates, form);
  out.s = (Matrix3c::Identity() + lr.r) * cs.s_wl;
  return out;
}

ScatteringMatrix smatrix_adiabatic(const DeviceParams& params, const BiasPoint& bias,
                                   const QuasiparticleSector& sector, double f_ghz,
                                   const RateConvention& rates) {
  return smatrix_adiabatic(solve_loop(params, bias, sector), params, f_ghz, rates);
}

}  // namespace fanocirc
