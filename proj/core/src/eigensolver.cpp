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

#include <lapacke.h>

#include <sstream>
#include <vector>

#include "fanocirc/device.hpp"

namespace fanocirc {

namespace {

double hermiticity_defect(const MatrixXc& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

EigenSystem eigensystem(const LoopHamiltonian& h, int n_levels) {
  const MatrixXc& m = h.matrix;
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw ValidationError("loop Hamiltonian must be square");
  if (n_levels < 1 || n_levels > n) throw ValidationError("n_levels out of range for basis");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > 1e-12 * scale) {
    throw ValidationError("eigensystem requires a Hermitian operator");
  }

  // zheevr overwrites its input.
  MatrixXc work = m;
  std::vector<double> w(n);
  MatrixXc z(n, n_levels);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n_levels));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(work.data()),
      n, 0.0, 0.0, 1, n_levels, 0.0, &found, w.data(),
      reinterpret_cast<lapack_complex_double*>(z.data()), n, support.data());

  EigenSystem es;
  es.states = std::move(z);
  es.energies = Eigen::Map<Eigen::VectorXd>(w.data(), n_levels);
  const MatrixXc residual = m * es.states - es.states * es.energies.asDiagonal();
  es.max_residual = residual.colwise().norm().maxCoeff();

  if (info != 0 || found != n_levels || es.max_residual > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "loop eigensolver failed to converge (info=" << info << ", found=" << found
        << ", residual norm=" << es.max_residual << ")";
    throw SolverError(msg.str());
  }

  es.omega = es.energies.array() - es.energies(0);

  Eigen::VectorXd n1(n), n2(n);
  for (int i = 0; i < n; ++i) {
    n1(i) = h.basis.n1(i);
    n2(i) = h.basis.n2(i);
    if (h.basis.on_boundary(i)) es.boundary_weight += std::norm(es.states(i, 0));
  }
  const auto& v = es.states;
  es.q[0] = v.adjoint() * n1.asDiagonal() * v;
  es.q[1] = v.adjoint() * (-n2).asDiagonal() * v;
  es.q[2] = v.adjoint() * (n2 - n1).asDiagonal() * v;

  if (es.boundary_weight > kBoundaryWeightLimit) {
    std::ostringstream msg;
    msg << "charge truncation n_cut=" << h.basis.n_cut()
        << " leaves ground-state weight " << es.boundary_weight << " on boundary charge states";
    es.warnings.push_back(msg.str());
  }
  return es;
}

}  // namespace fanocirc
