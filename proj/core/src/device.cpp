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

#include "fanocirc/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fanocirc/parallel.hpp"

namespace fanocirc {

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << field << " must be strictly positive and finite (got " << value << ")";
    throw ValidationError(msg.str());
  }
}

void require_non_negative(double value, const char* field) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << field << " must be non-negative and finite (got " << value << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("FANOCIRC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void DeviceParams::validate() const {
  require_positive(e_c_sigma_ghz, "e_c_sigma_ghz");
  for (double e : e_j_ghz) require_positive(e, "e_j_ghz");
  require_non_negative(c_x_ff, "c_x_ff");
  if (c_c_tilde_ff) require_positive(*c_c_tilde_ff, "c_c_tilde_ff");
  require_positive(z_wg_ohm, "z_wg_ohm");
  require_non_negative(gamma_ghz, "gamma_ghz");
  if (n_cut < 3) throw ValidationError("n_cut must be >= 3");
  if (n_levels < 3) throw ValidationError("n_levels must be >= 3");
  const int side = 2 * n_cut + 1;
  if (n_levels > side * side) {
    throw ValidationError("n_levels must not exceed the charge-basis dimension (2*n_cut+1)^2");
  }
}

double BiasPoint::reduced_phi_x() const {
  double r = std::fmod(phi_x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

QuasiparticleSector QuasiparticleSector::from_id(int id) {
  switch (id) {
    case 0: return {0, {0.0, 0.0}};
    case 1: return {1, {0.5, 0.0}};
    case 2: return {2, {0.0, 0.5}};
    case 3: return {3, {0.5, 0.5}};
    default: throw ValidationError("sector must be in 0..3 (got " + std::to_string(id) + ")");
  }
}

std::array<QuasiparticleSector, 4> QuasiparticleSector::all() {
  return {from_id(0), from_id(1), from_id(2), from_id(3)};
}

std::array<double, 3> junction_energies_from_spread(double e_j_mean_ghz, double delta) {
  if (delta < 0.0) throw ValidationError("junction spread delta must be non-negative");
  if (delta >= 2.0) throw ValidationError("junction spread delta must be < 2");
  require_positive(e_j_mean_ghz, "e_j_mean_ghz");
  return {e_j_mean_ghz * (1.0 - delta / 2.0), e_j_mean_ghz, e_j_mean_ghz * (1.0 + delta / 2.0)};
}

double junction_spread(std::span<const double, 3> e_j_ghz) {
  for (double e : e_j_ghz) require_positive(e, "e_j_ghz");
  const auto [lo, hi] = std::minmax_element(e_j_ghz.begin(), e_j_ghz.end());
  const double mean = (e_j_ghz[0] + e_j_ghz[1] + e_j_ghz[2]) / 3.0;
  return (*hi - *lo) / mean;
}

ChargeBasis::ChargeBasis(int n_cut) : n_cut_(n_cut) {
  if (n_cut < 1) throw ValidationError("n_cut must be positive");
}

bool ChargeBasis::on_boundary(int index) const {
  return std::abs(n1(index)) == n_cut_ || std::abs(n2(index)) == n_cut_;
}

LoopHamiltonian build_loop_hamiltonian(const DeviceParams& params, const BiasPoint& bias,
                                       const QuasiparticleSector& sector) {
  params.validate();
  ChargeBasis basis(params.n_cut);
  const int dim = basis.dim();
  const int n_cut = basis.n_cut();

  // n_0 = 0: only bias differences relative to island 3 enter.
  const double ng1 = bias.n_g[0] + sector.charge_offsets[0];
  const double ng2 = bias.n_g[1] + sector.charge_offsets[1];
  const double ng3 = bias.n_g[2];
  const double off1 = 0.5 * (ng1 - ng3);
  const double off2 = 0.5 * (ng2 - ng3);

  MatrixXc h = MatrixXc::Zero(dim, dim);
  const double ec = params.e_c_sigma_ghz;
  for (int i = 0; i < dim; ++i) {
    const double n1 = basis.n1(i);
    const double n2 = basis.n2(i);
    const double a = n1 - off1;
    const double b = n2 + off2;
    h(i, i) = ec * (a * a + b * b - n1 * n2);
  }

  const cplx phase = std::polar(1.0, -bias.phi_x / 3.0);
  const cplx t1 = -0.5 * params.e_j_ghz[0] * phase;
  const cplx t2 = -0.5 * params.e_j_ghz[1] * phase;
  const cplx t3 = -0.5 * params.e_j_ghz[2] * std::conj(phase);
  for (int n1 = -n_cut; n1 <= n_cut; ++n1) {
    for (int n2 = -n_cut; n2 <= n_cut; ++n2) {
      const int from = basis.index(n1, n2);
      if (n1 < n_cut) {
        const int to = basis.index(n1 + 1, n2);
        h(to, from) += t1;
        h(from, to) += std::conj(t1);
      }
      if (n2 < n_cut) {
        const int to = basis.index(n1, n2 + 1);
        h(to, from) += t2;
        h(from, to) += std::conj(t2);
      }
      if (n1 < n_cut && n2 < n_cut) {
        const int to = basis.index(n1 + 1, n2 + 1);
        h(to, from) += t3;
        h(from, to) += std::conj(t3);
      }
    }
  }
  return {basis, std::move(h)};
}

EigenSystem solve_loop(const DeviceParams& params, const BiasPoint& bias,
                       const QuasiparticleSector& sector) {
  return eigensystem(build_loop_hamiltonian(params, bias, sector), params.n_levels);
}

std::array<MatrixXc, 3> coupling_operators(const EigenSystem& es, double gamma_ghz) {
  if (gamma_ghz < 0.0) throw ValidationError("gamma_ghz must be non-negative");
  const double amp = std::sqrt(gamma_ghz);
  std::array<MatrixXc, 3> out;
  for (int j = 0; j < 3; ++j) {
    out[j] = amp * es.q[j].triangularView<Eigen::StrictlyUpper>().toDenseMatrix();
  }
  return out;
}

std::vector<SpectrumRow> transition_spectrum(const DeviceParams& params, const BiasPoint& bias,
                                             std::span<const double> flux_grid,
                                             std::span<const QuasiparticleSector> sectors) {
  params.validate();
  for (double phi : flux_grid) {
    if (!std::isfinite(phi)) throw ValidationError("flux grid must be finite");
  }
  const std::size_t n_sec = sectors.size();
  std::vector<SpectrumRow> rows(flux_grid.size() * n_sec);
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double phi = flux_grid[idx / n_sec];
    const auto& sector = sectors[idx % n_sec];
    BiasPoint b = bias;
    b.phi_x = phi;
    const EigenSystem es = solve_loop(params, b, sector);
    SpectrumRow& row = rows[idx];
    row.phi_x = phi;
    row.sector = sector.id;
    row.omega.assign(es.omega.data() + 1, es.omega.data() + es.omega.size());
    row.warnings = es.warnings;
  });
  return rows;
}

}  // namespace fanocirc
