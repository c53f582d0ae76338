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

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "fanocirc/dynamics.hpp"

namespace fanocirc {

namespace {

Eigen::Map<const VectorXc> as_vector(const MatrixXc& m) {
  return Eigen::Map<const VectorXc>(m.data(), m.size());
}

}  // namespace

MatrixXc Liouvillian::apply(const MatrixXc& rho) const {
  const VectorXc out = matrix * as_vector(rho);
  return Eigen::Map<const MatrixXc>(out.data(), dim, dim);
}

Liouvillian build_liouvillian(const ComposedSystem& cs, double omega_d_ghz,
                              const RateConvention& rates) {
  const int d = cs.dim();
  const double hs = rates.hamiltonian_scale();
  const double rs = rates.rate_scale();
  const MatrixXc id = MatrixXc::Identity(d, d);
  const MatrixXc h = hs * cs.h_loop_rot + rs * (cs.h_s + cs.h_d);

  Liouvillian lv;
  lv.dim = d;
  lv.omega_d_ghz = omega_d_ghz;
  lv.alpha = cs.alpha;
  lv.matrix = -kI * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id));
  for (const auto& l : cs.l_tot) {
    const MatrixXc ldl = l.adjoint() * l;
    lv.matrix += rs * (Eigen::kroneckerProduct(l.conjugate(), l).eval() -
                       0.5 * Eigen::kroneckerProduct(id, ldl).eval() -
                       0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval());
  }
  return lv;
}

SteadyState steady_state(const Liouvillian& lv) {
  const int d = lv.dim;
  const int n = d * d;
  // [[L, w], [w^T, 0]] [x; mu] = [0; 1] with w = vec(1). Since w^T L = 0,
  // the system is nonsingular exactly when ker L is one-dimensional.
  MatrixXc bordered = MatrixXc::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = lv.matrix;
  for (int i = 0; i < d; ++i) {
    bordered(i * d + i, n) = 1.0;
    bordered(n, i * d + i) = 1.0;
  }
  VectorXc rhs = VectorXc::Zero(n + 1);
  rhs(n) = 1.0;

  const Eigen::PartialPivLU<MatrixXc> lu(bordered);
  SteadyState ss;
  ss.rcond = lu.rcond();
  // rcond() is only an estimate and can miss exact zero pivots; check them too.
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(ss.rcond > 1e-12) || !(piv.minCoeff() > 1e-13 * piv.maxCoeff())) {
    std::ostringstream msg;
    msg << "Liouvillian kernel is not one-dimensional (rcond=" << ss.rcond
        << "); the system likely has a symmetry or degenerate dark subspace";
    throw SolverError(msg.str());
  }
  const VectorXc sol = lu.solve(rhs);
  MatrixXc rho = Eigen::Map<const MatrixXc>(sol.data(), d, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  ss.rho = rho;
  ss.residual = (lv.matrix * as_vector(ss.rho)).norm();
  if (!(ss.residual < 1e-10)) {
    std::ostringstream msg;
    msg << "steady-state solve did not converge (residual " << ss.residual << ")";
    throw SolverError(msg.str());
  }
  ss.min_eigenvalue = Eigen::SelfAdjointEigenSolver<MatrixXc>(ss.rho, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return ss;
}

double spectral_radius(const Liouvillian& lv) {
  const Eigen::ComplexEigenSolver<MatrixXc> es(lv.matrix, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXc evolve(const Liouvillian& lv, const MatrixXc& rho0, double t_final_ns, double dt_ns) {
  if (rho0.rows() != lv.dim || rho0.cols() != lv.dim) {
    throw ValidationError("evolve: initial state dimension does not match the Liouvillian");
  }
  if (!(dt_ns > 0.0) || t_final_ns < 0.0) throw ValidationError("evolve: need dt > 0, t >= 0");
  const double radius = spectral_radius(lv);
  if (dt_ns * radius >= 0.1) {
    std::ostringstream msg;
    msg << "evolve: step " << dt_ns << " ns does not resolve the fastest rate " << radius
        << " /ns (need dt * rate < 0.1)";
    throw ValidationError(msg.str());
  }
  const long steps = std::max(1L, static_cast<long>(std::ceil(t_final_ns / dt_ns - 1e-9)));
  const double h = t_final_ns / static_cast<double>(steps);
  if (t_final_ns == 0.0) return rho0;

  const MatrixXc& m = lv.matrix;
  VectorXc y = as_vector(rho0);
  VectorXc k1, k2, k3, k4;
  for (long s = 0; s < steps; ++s) {
    k1.noalias() = m * y;
    k2.noalias() = m * (y + 0.5 * h * k1);
    k3.noalias() = m * (y + 0.5 * h * k2);
    k4.noalias() = m * (y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Eigen::Map<const MatrixXc>(y.data(), lv.dim, lv.dim);
}

}  // namespace fanocirc
