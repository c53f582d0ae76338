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

// Three-junction loop: charge-basis Hamiltonian, its low-lying eigensystem,
// and the waveguide coupling operators built from it.
//
// All energies are ordinary frequencies E/h in GHz. Conversion to angular
// units happens only in the dynamics layer.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fanocirc/types.hpp"

namespace fanocirc {

/// Electrical constants of the chip.
struct DeviceParams {
  double e_c_sigma_ghz = 3.09;
  std::array<double, 3> e_j_ghz{15.03, 15.03, 15.03};
  double c_x_ff = 75.0;
  /// Coupling capacitance between exterior and interior waveguide ports.
  /// `std::nullopt` selects the galvanic (infinite-capacitance) limit.
  std::optional<double> c_c_tilde_ff;
  double z_wg_ohm = 50.0;
  double gamma_ghz = 0.27;
  int n_cut = 7;
  int n_levels = 5;

  /// Throws ValidationError naming the first field that breaks an invariant.
  void validate() const;
};

/// External DC controls. `phi_x` is the dimensionless flux 2*pi*Phi_x/Phi_0.
struct BiasPoint {
  double phi_x = 0.0;
  std::array<double, 3> n_g{0.0, 0.0, 0.0};

  /// phi_x folded into [0, 2*pi).
  [[nodiscard]] double reduced_phi_x() const;
};

/// One of the four quasiparticle configurations, modelled as half-integer
/// offsets added to (n_g1, n_g2).
struct QuasiparticleSector {
  int id = 0;
  std::array<double, 2> charge_offsets{0.0, 0.0};

  static QuasiparticleSector from_id(int id);
  static std::array<QuasiparticleSector, 4> all();
};

/// Junction energies (E(1 - d/2), E, E(1 + d/2)).
std::array<double, 3> junction_energies_from_spread(double e_j_mean_ghz, double delta);

/// Relative spread (max - min) / mean.
double junction_spread(std::span<const double, 3> e_j_ghz);

/// Product basis |n1', n2'> with each charge in [-n_cut, n_cut].
class ChargeBasis {
 public:
  explicit ChargeBasis(int n_cut);

  [[nodiscard]] int n_cut() const { return n_cut_; }
  [[nodiscard]] int side() const { return 2 * n_cut_ + 1; }
  [[nodiscard]] int dim() const { return side() * side(); }
  [[nodiscard]] int index(int n1, int n2) const { return (n1 + n_cut_) * side() + (n2 + n_cut_); }
  [[nodiscard]] int n1(int index) const { return index / side() - n_cut_; }
  [[nodiscard]] int n2(int index) const { return index % side() - n_cut_; }
  [[nodiscard]] bool on_boundary(int index) const;

 private:
  int n_cut_;
};

struct LoopHamiltonian {
  ChargeBasis basis;
  MatrixXc matrix;
};

/// Loop Hamiltonian in the truncated charge basis with the total charge
/// n_0 fixed to zero. Each cosine is split as 1/2 (e^{-i phi_x/3} T + h.c.)
/// with T the unit charge translation; e^{i phi'_1} raises n'_1.
LoopHamiltonian build_loop_hamiltonian(const DeviceParams& params, const BiasPoint& bias,
                                       const QuasiparticleSector& sector);

/// Lowest eigenpairs of the loop and the island charge operators projected
/// onto them.
struct EigenSystem {
  /// Absolute eigenenergies, GHz.
  Eigen::VectorXd energies;
  /// Transition frequencies from the ground state; omega(0) == 0.
  Eigen::VectorXd omega;
  /// Columns are eigenvectors in the charge basis.
  MatrixXc states;
  /// <k|q_j|l> with q_1 = n'_1, q_2 = -n'_2, q_3 = -n'_1 + n'_2.
  std::array<MatrixXc, 3> q;
  /// Ground-state probability on charge states with |n'_i| == n_cut.
  double boundary_weight = 0.0;
  /// Largest ||H v - E v|| over the retained pairs.
  double max_residual = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] int n_levels() const { return static_cast<int>(omega.size()); }
};

inline constexpr double kBoundaryWeightLimit = 1e-8;

/// Diagonalizes `h` and keeps the lowest `n_levels` pairs. Uses LAPACK's
/// MRRR driver restricted to the wanted index range.
EigenSystem eigensystem(const LoopHamiltonian& h, int n_levels);

/// Convenience: build + diagonalize.
EigenSystem solve_loop(const DeviceParams& params, const BiasPoint& bias,
                       const QuasiparticleSector& sector);

/// L_j = sqrt(gamma) * sum_{k<l} <k|q_j|l> |k><l|. Strictly upper triangular.
std::array<MatrixXc, 3> coupling_operators(const EigenSystem& es, double gamma_ghz);

struct SpectrumRow {
  double phi_x = 0.0;
  int sector = 0;
  /// omega_1 .. omega_{n_levels-1}, GHz.
  std::vector<double> omega;
  std::vector<std::string> warnings;
};

/// One row per (flux, sector), flux-major. Rows are independent and are
/// evaluated in parallel.
std::vector<SpectrumRow> transition_spectrum(const DeviceParams& params, const BiasPoint& bias,
                                             std::span<const double> flux_grid,
                                             std::span<const QuasiparticleSector> sectors);

}  // namespace fanocirc
