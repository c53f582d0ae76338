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
#include <cstdlib>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fanocirc/device.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

namespace fanocirc {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sorted_spectrum(const LoopHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(h.matrix, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

TEST(JunctionSpread, ZeroSpreadGivesEqualEnergies) {
  const auto e = junction_energies_from_spread(15.03, 0.0);
  for (double v : e) EXPECT_DOUBLE_EQ(v, 15.03);
}

TEST(JunctionSpread, ConstructorFormula) {
  const auto e = junction_energies_from_spread(15.03, 0.03);
  EXPECT_NEAR(e[0], 14.80455, 1e-12);
  EXPECT_NEAR(e[1], 15.03, 1e-12);
  EXPECT_NEAR(e[2], 15.25545, 1e-12);
}

TEST(JunctionSpread, FittedChip) {
  const std::array<double, 3> e{14.73, 15.15, 15.22};
  EXPECT_NEAR(junction_spread(e), 0.0326, 5e-5);
  const std::array<double, 3> flat{1.0, 1.0, 1.0};
  EXPECT_EQ(junction_spread(flat), 0.0);
}

TEST(JunctionSpread, RoundTripsAndRejectsNegative) {
  for (double d : {0.0, 0.01, 0.03, 0.05, 0.2}) {
    const auto e = junction_energies_from_spread(15.03, d);
    // Mean equals the middle value, so the spread comes back exactly.
    EXPECT_NEAR(junction_spread(e), d, 1e-14) << d;
  }
  const std::array<double, 3> e{15.03 * 0.985, 15.03, 15.03 * 1.015};
  EXPECT_NEAR(junction_spread(e), 0.03, 1e-14);
  EXPECT_THROW(junction_energies_from_spread(15.03, -0.01), ValidationError);
  EXPECT_THROW(junction_energies_from_spread(15.03, 2.0), ValidationError);
}

TEST(DeviceParams, ValidationNamesField) {
  auto p = fixture::fitted();
  p.c_x_ff = -1.0;
  try {
    p.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("c_x_ff"), std::string::npos);
  }
  p = fixture::fitted();
  p.e_c_sigma_ghz = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = fixture::fitted();
  p.n_cut = 2;
  p.n_levels = 26;
  EXPECT_THROW(p.validate(), ValidationError);
  p = fixture::fitted();
  p.c_c_tilde_ff = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_THROW(QuasiparticleSector::from_id(4), ValidationError);
}

TEST(Sectors, AreTheFourHalfIntegerOffsets) {
  const auto all = QuasiparticleSector::all();
  const std::array<std::array<double, 2>, 4> want{{{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(all[i].id, i);
    EXPECT_EQ(all[i].charge_offsets, want[i]);
  }
}

TEST(LoopHamiltonian, HermitianForRandomInputs) {
  std::srand(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = fixture::fitted();
    p.n_cut = 4;
    p.n_levels = 5;
    const Eigen::Vector3d r = Eigen::Vector3d::Random();
    p.e_j_ghz = {12.0 + 3.0 * r[0], 15.0 + 2.0 * r[1], 14.0 + r[2]};
    const Eigen::Vector4d b = Eigen::Vector4d::Random();
    const BiasPoint bias{10.0 * b[0], {b[1], 2.0 * b[2], b[3]}};
    const auto h = build_loop_hamiltonian(p, bias, QuasiparticleSector::from_id(trial % 4));
    EXPECT_EQ(h.matrix.rows(), 81);
    EXPECT_LT((h.matrix - h.matrix.adjoint()).norm(), 1e-12);
  }
}

TEST(LoopHamiltonian, RealAtZeroFlux) {
  const auto h = build_loop_hamiltonian(fixture::fitted(), {0.0, fixture::kNgOpt},
                                        QuasiparticleSector::from_id(3));
  EXPECT_EQ(h.matrix.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(LoopHamiltonian, MatchesKroneckerAssembly) {
  const auto p = fixture::fitted();
  for (double phi : {0.0, 1.3, kPi, 4.4}) {
    const BiasPoint bias{phi, {0.3, 1.7, 0.2}};
    const auto h = build_loop_hamiltonian(p, bias, QuasiparticleSector::from_id(0));
    const auto dense = oracle::dense_loop(p.e_c_sigma_ghz, p.e_j_ghz, phi, bias.n_g, p.n_cut);
    EXPECT_LT((h.matrix - dense.h).cwiseAbs().maxCoeff(), 1e-12) << phi;
  }
}

TEST(LoopHamiltonian, GlobalChargeGaugeInvariance) {
  const auto p = fixture::fitted();
  const BiasPoint a{2.1, {0.2, 0.9, 0.4}};
  const BiasPoint b{2.1, {0.2 + 0.37, 0.9 + 0.37, 0.4 + 0.37}};
  for (const auto& sector : QuasiparticleSector::all()) {
    const auto ea = sorted_spectrum(build_loop_hamiltonian(p, a, sector));
    const auto eb = sorted_spectrum(build_loop_hamiltonian(p, b, sector));
    EXPECT_LT((ea - eb).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LoopHamiltonian, FluxPeriodicity) {
  const auto p = fixture::fitted();
  for (double phi : {0.0, 0.8, 3.5, 5.9}) {
    const BiasPoint a{phi, fixture::kNgOpt};
    const BiasPoint b{phi + 2.0 * kPi, fixture::kNgOpt};
    const BiasPoint c{phi - 4.0 * kPi, fixture::kNgOpt};
    const auto sector = QuasiparticleSector::from_id(1);
    const auto ea = sorted_spectrum(build_loop_hamiltonian(p, a, sector));
    EXPECT_LT((ea - sorted_spectrum(build_loop_hamiltonian(p, b, sector))).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_LT((ea - sorted_spectrum(build_loop_hamiltonian(p, c, sector))).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(LoopHamiltonian, FluxParity) {
  // Complex conjugation of the charge-basis matrix reverses the flux.
  for (const auto& p : {fixture::symmetric(), fixture::fitted()}) {
    for (double phi : {0.4, 2.0, 3.0}) {
      const auto a = solve_loop(p, {phi, {0.3, 0.6, 0.0}}, QuasiparticleSector::from_id(0));
      const auto b = solve_loop(p, {-phi, {0.3, 0.6, 0.0}}, QuasiparticleSector::from_id(0));
      EXPECT_LT((a.omega - b.omega).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(LoopHamiltonian, CyclicRelabelingOfIslands) {
  auto p = fixture::fitted();
  p.n_cut = 9;
  p.n_levels = 6;
  auto q = p;
  // Islands 1 -> 2 -> 3 -> 1. Junction slots are (1,3), (2,3), (1,2), so the
  // energies move one slot back.
  q.e_j_ghz = {p.e_j_ghz[1], p.e_j_ghz[2], p.e_j_ghz[0]};
  const std::array<double, 3> ng{0.31, 0.74, 0.12};
  const std::array<double, 3> ng_rot{ng[2], ng[0], ng[1]};
  for (double phi : {0.0, 1.1, 3.5}) {
    const auto a = solve_loop(p, {phi, ng}, QuasiparticleSector::from_id(0));
    const auto b = solve_loop(q, {phi, ng_rot}, QuasiparticleSector::from_id(0));
    EXPECT_LT((a.omega - b.omega).cwiseAbs().maxCoeff(), 1e-8) << phi;
  }
}

TEST(EigenSystem, Invariants) {
  const auto es = solve_loop(fixture::fitted(), fixture::operating_bias(),
                             QuasiparticleSector::from_id(0));
  ASSERT_EQ(es.n_levels(), 5);
  EXPECT_EQ(es.omega[0], 0.0);
  for (int k = 1; k < es.n_levels(); ++k) EXPECT_GE(es.omega[k], es.omega[k - 1]);
  const MatrixXc gram = es.states.adjoint() * es.states;
  EXPECT_LT((gram - MatrixXc::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  for (const auto& q : es.q) EXPECT_LT((q - q.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((es.q[0] + es.q[1] + es.q[2]).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(es.max_residual, 1e-9);
}

TEST(EigenSystem, ChargeOperatorDefinitions) {
  auto p = fixture::fitted();
  p.n_cut = 5;
  const BiasPoint bias{1.7, {0.4, 0.2, 0.0}};
  const auto es = solve_loop(p, bias, QuasiparticleSector::from_id(0));
  const auto dense = oracle::dense_loop(p.e_c_sigma_ghz, p.e_j_ghz, bias.phi_x, bias.n_g, 5);
  const MatrixXc& v = es.states;
  const MatrixXc q1 = v.adjoint() * dense.n1 * v;
  const MatrixXc q2 = -(v.adjoint() * dense.n2 * v);
  EXPECT_LT((es.q[0] - q1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((es.q[1] - q2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((es.q[2] + q1 + q2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigenSystem, SymmetricJunctionsHaveDegenerateDoublet) {
  auto p = fixture::symmetric();
  p.n_cut = 9;
  // Cyclic symmetry plus time reversal pairs the two complex Z3 charges.
  const auto zero = solve_loop(p, {0.0, {0.0, 0.0, 0.0}}, QuasiparticleSector::from_id(0));
  EXPECT_LT(std::abs(zero.omega[1] - zero.omega[2]), 1e-6);
  // At half flux the ground state and first excitation are split; the pair sits above.
  const auto half = solve_loop(p, {kPi, {0.0, 0.0, 0.0}}, QuasiparticleSector::from_id(0));
  EXPECT_GT(half.omega[1], 0.1);
  EXPECT_LT(std::abs(half.omega[2] - half.omega[3]), 1e-6);
}

TEST(EigenSystem, TruncationWarning) {
  auto p = fixture::fitted();
  p.n_cut = 3;
  const auto es = solve_loop(p, {0.0, {0.0, 0.0, 0.0}}, QuasiparticleSector::from_id(0));
  EXPECT_GT(es.boundary_weight, kBoundaryWeightLimit);
  EXPECT_FALSE(es.warnings.empty());
  p.n_cut = 11;
  EXPECT_TRUE(solve_loop(p, {0.0, {0.0, 0.0, 0.0}}, QuasiparticleSector::from_id(0))
                  .warnings.empty());
}

// Dense Kronecker-product diagonalization at n_cut = 9, fitted chip, sector
// (0, 0), charge bias of the clockwise optimum. Increasing n_cut to 11
// moves none of these by more than 1e-9.
struct FrozenRow {
  double phi;
  std::array<double, 4> omega;
};
constexpr std::array<FrozenRow, 6> kFrozen{{
    {0.0, {10.922012320555, 11.037938831916, 21.040026655280, 21.494650313914}},
    {1.0, {10.546890893432, 10.673672517272, 20.169135273068, 20.756277742317}},
    {2.0, {9.332013784329, 9.503197198196, 17.124137464616, 18.283967369743}},
    {kPi, {0.452113303214, 5.324619442664, 5.926211511318, 7.933967353204}},
    {fixture::kPhiOpt, {7.245834794995, 7.496723799224, 8.200925367580, 12.290628800007}},
    {5.0, {10.297875080435, 10.432547317606, 19.577975289026, 20.263746843530}},
}};

TEST(Spectrum, MatchesFrozenDenseOracle) {
  auto p = fixture::fitted();
  p.n_cut = 9;
  for (const auto& row : kFrozen) {
    const auto es = solve_loop(p, {row.phi, fixture::kNgOpt}, QuasiparticleSector::from_id(0));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(es.omega[k + 1], row.omega[k], 1e-9) << row.phi;
  }
}

TEST(Spectrum, LiveDenseOracleAgrees) {
  auto p = fixture::fitted();
  p.n_cut = 6;
  for (double phi : {0.0, 2.5, 3.9}) {
    const auto es = solve_loop(p, {phi, {0.3, 1.2, 0.0}}, QuasiparticleSector::from_id(2));
    const auto want = oracle::dense_transitions(p.e_c_sigma_ghz, p.e_j_ghz, phi,
                                                {0.3, 1.2 + 0.5, 0.0}, 6, 4);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(es.omega[k + 1], want[k], 1e-9);
  }
}

TEST(Spectrum, SectorsAtOperatingFlux) {
  auto p = fixture::fitted();
  p.n_cut = 9;
  const std::array<std::array<double, 4>, 4> want{{
      {7.245834794995, 7.496723799224, 8.200925367580, 12.290628800007},
      {7.085039954863, 7.518205163132, 8.481681296245, 11.800053904481},
      {7.394694747421, 7.638224968383, 7.804925371434, 12.895535194385},
      {7.105837796089, 7.664046204863, 8.213211151966, 12.048779434545},
  }};
  for (const auto& sector : QuasiparticleSector::all()) {
    const auto es = solve_loop(p, fixture::operating_bias(), sector);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(es.omega[k + 1], want[sector.id][k], 1e-9);
  }
  EXPECT_GT(std::abs(want[0][0] - want[3][0]), 0.1);
}

TEST(Spectrum, TruncationConvergenceAtOperatingBias) {
  auto p = fixture::fitted();
  for (const auto& sector : QuasiparticleSector::all()) {
    p.n_cut = 7;
    const auto a = solve_loop(p, fixture::operating_bias(), sector);
    p.n_cut = 9;
    const auto b = solve_loop(p, fixture::operating_bias(), sector);
    EXPECT_LT((a.omega - b.omega).cwiseAbs().maxCoeff(), 1e-6) << sector.id;
  }
}

TEST(Spectrum, TruncationConvergenceAcrossFlux) {
  auto p = fixture::fitted();
  std::vector<double> flux;
  for (int i = 0; i < 25; ++i) flux.push_back(2.0 * kPi * i / 24.0);
  const auto sectors = QuasiparticleSector::all();
  p.n_cut = 9;
  const auto a = transition_spectrum(p, fixture::operating_bias(), flux, sectors);
  p.n_cut = 11;
  const auto b = transition_spectrum(p, fixture::operating_bias(), flux, sectors);
  ASSERT_EQ(a.size(), flux.size() * 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].omega.size(); ++k) {
      EXPECT_LT(std::abs(a[i].omega[k] - b[i].omega[k]), 1e-6);
    }
  }
}

TEST(Spectrum, RowsAreFluxMajorAndInBand) {
  const auto p = fixture::fitted();
  const std::vector<double> flux{3.3, fixture::kPhiOpt, 3.7};
  const auto sectors = QuasiparticleSector::all();
  const auto rows = transition_spectrum(p, fixture::operating_bias(), flux, sectors);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[5].phi_x, fixture::kPhiOpt);
  EXPECT_EQ(rows[5].sector, 1);
  ASSERT_EQ(rows[4].omega.size(), 4u);
  // Lowest doublet of the operating point straddles the 7.25 GHz resonance.
  EXPECT_LT(std::abs(rows[4].omega[0] - 7.25), 0.1);
  const std::vector<double> bad{0.0, std::nan("")};
  EXPECT_THROW(transition_spectrum(p, {}, bad, sectors), ValidationError);
}

TEST(Coupling, StrictlyUpperTriangularAndScaled) {
  const auto es = solve_loop(fixture::fitted(), fixture::operating_bias(),
                             QuasiparticleSector::from_id(0));
  for (const auto& l : coupling_operators(es, 0.0)) EXPECT_EQ(l.norm(), 0.0);
  const auto ls = coupling_operators(es, 0.27);
  for (int j = 0; j < 3; ++j) {
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c <= r; ++c) EXPECT_EQ(ls[j](r, c), cplx(0.0));
      for (int c = r + 1; c < 5; ++c) EXPECT_NEAR(std::abs(ls[j](r, c) - std::sqrt(0.27) * es.q[j](r, c)), 0.0, 1e-15);
    }
  }
  EXPECT_THROW(coupling_operators(es, -1.0), ValidationError);
}

TEST(Coupling, DominantMatrixElementIsOrderOneThird) {
  const auto es = solve_loop(fixture::fitted(), fixture::operating_bias(),
                             QuasiparticleSector::from_id(0));
  double best = 0.0;
  for (int j = 0; j < 3; ++j) {
    for (int k = 1; k < es.n_levels(); ++k) best = std::max(best, std::norm(es.q[j](k, 0)));
  }
  EXPECT_GT(best, 0.2);
  EXPECT_LT(best, 0.45);
}

}  // namespace
}  // namespace fanocirc
