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
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fanocirc/analysis.hpp"
#include "fixture.hpp"

namespace fanocirc {
namespace {

Matrix3c clockwise_permutation() {
  Matrix3c p = Matrix3c::Zero();
  p(1, 0) = p(2, 1) = p(0, 2) = 1.0;
  return p;
}

TEST(Fidelity, IdealCirculator) {
  const auto r = circulation_fidelities(clockwise_permutation());
  EXPECT_EQ(r.f_cw, 1.0);
  EXPECT_EQ(r.f_ccw, 0.0);
  EXPECT_EQ(r.r_avg, 0.0);
  EXPECT_EQ(r.value(Direction::kClockwise), 1.0);
  const auto t = circulation_fidelities(clockwise_permutation().transpose());
  EXPECT_EQ(t.f_ccw, 1.0);
  EXPECT_EQ(t.f_cw, 0.0);
}

TEST(Fidelity, IdentityReflects) {
  const auto r = circulation_fidelities(Matrix3c::Identity());
  EXPECT_EQ(r.r_avg, 1.0);
  EXPECT_EQ(r.f_cw, 0.0);
  EXPECT_EQ(r.f_ccw, 0.0);
}

TEST(Fidelity, TermsAndBounds) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix3c m;
    for (int i = 0; i < 9; ++i) m(i) = {n(gen), n(gen)};
    Eigen::JacobiSVD<Matrix3c> svd(m);
    const Matrix3c s = m / svd.singularValues()(0);
    const auto r = circulation_fidelities(s);
    EXPECT_DOUBLE_EQ(r.f_cw, (std::abs(s(1, 0)) + std::abs(s(2, 1)) + std::abs(s(0, 2))) / 3.0);
    EXPECT_DOUBLE_EQ(r.f_ccw, (std::abs(s(0, 1)) + std::abs(s(1, 2)) + std::abs(s(2, 0))) / 3.0);
    EXPECT_DOUBLE_EQ(r.r_avg, (std::abs(s(0, 0)) + std::abs(s(1, 1)) + std::abs(s(2, 2))) / 3.0);
    for (double v : {r.f_cw, r.f_ccw, r.r_avg}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
    const auto p = performance_db(r, {});
    EXPECT_DOUBLE_EQ(p.il_db, -20.0 * std::log10(r.f_cw));
    EXPECT_DOUBLE_EQ(p.is_db, -20.0 * std::log10(r.f_ccw));
    EXPECT_DOUBLE_EQ(p.r_db, 20.0 * std::log10(r.r_avg));
  }
}

TEST(Decibels, Conversions) {
  EXPECT_EQ(loss_db(1.0), 0.0);
  EXPECT_NEAR(loss_db(0.12), 18.4164, 1e-4);
  EXPECT_EQ(loss_db(0.0), std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 1e-3);
  EXPECT_NEAR(watts_to_dbm(dbm_to_watts(-126.5)), -126.5, 1e-12);
}

TEST(Bandwidth, InterpolatesCrossings) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  // Below 1 on [0.5, 3.2] and [5 + 2/3, 6]; above on [0, 0.5] and [3.2, 5 + 2/3].
  const std::vector<double> m{1.5, 0.5, 0.2, 0.8, 1.8, 1.2, 0.9};
  EXPECT_NEAR(contiguous_width(x, m, 1.0, false), 2.7, 1e-12);
  EXPECT_NEAR(contiguous_width(x, m, 1.0, true), 5.0 + 2.0 / 3.0 - 3.2, 1e-12);
  EXPECT_EQ(contiguous_width(x, m, 0.0, false), 0.0);
  EXPECT_DOUBLE_EQ(contiguous_width(x, m, 10.0, false), 6.0);
  EXPECT_THROW(contiguous_width(x, std::vector<double>{1.0}, 1.0, false), ValidationError);
}

TEST(Bandwidth, FrequencyGrid) {
  const auto g = frequency_grid(7.0, 7.5, 2.0);
  ASSERT_EQ(g.size(), 251u);
  EXPECT_EQ(g.front(), 7.0);
  EXPECT_NEAR(g.back(), 7.5, 1e-12);
  EXPECT_EQ(frequency_grid(7.0, 7.0, 1.0).size(), 1u);
  EXPECT_THROW(frequency_grid(7.5, 7.0, 1.0), ValidationError);
  EXPECT_THROW(frequency_grid(7.0, 7.5, 0.0), ValidationError);
}

TEST(Direction, Parsing) {
  EXPECT_EQ(direction_from_string("cw"), Direction::kClockwise);
  EXPECT_EQ(direction_from_string("counterclockwise"), Direction::kCounterClockwise);
  EXPECT_EQ(to_string(Direction::kCounterClockwise), "ccw");
  EXPECT_THROW(direction_from_string("left"), ValidationError);
}

TEST(Simplex, Rosenbrock) {
  auto rosen = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  const auto r = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.1, 0.1),
                             Eigen::Vector2d(-5, -5), Eigen::Vector2d(5, 5), 2000, 1e-10, 1e-14);
  EXPECT_NEAR(r.x(0), 1.0, 1e-4);
  EXPECT_NEAR(r.x(1), 1.0, 1e-4);
  EXPECT_LT(r.value, 1e-8);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.evals, 2000);
}

TEST(Simplex, ProjectsOntoBox) {
  auto bowl = [](const Eigen::VectorXd& x) { return std::pow(x(0) - 3.0, 2) + x(1) * x(1); };
  const auto r = nelder_mead(bowl, Eigen::Vector2d(0.0, 0.5), Eigen::Vector2d(0.2, 0.2),
                             Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 500, 1e-9, 1e-14);
  EXPECT_NEAR(r.x(0), 1.0, 1e-6);
  EXPECT_NEAR(r.x(1), 0.0, 1e-4);
  const auto capped = nelder_mead(bowl, Eigen::Vector2d(0.0, 0.5), Eigen::Vector2d(0.2, 0.2),
                                  Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 10, 0.0, 0.0);
  EXPECT_LE(capped.evals, 10);
  EXPECT_FALSE(capped.converged);
}

TEST(OperatingPoint, ClockwiseOptimumOfFittedChip) {
  const auto p = fixture::fitted();
  const auto s = smatrix_adiabatic(p, fixture::operating_bias(), QuasiparticleSector::from_id(0),
                                   fixture::kFOpt);
  const auto r = circulation_fidelities(s.s);
  // Measured peak 0.97 with counter-clockwise 0.12.
  EXPECT_NEAR(r.f_cw, 0.97, 0.01);
  EXPECT_LE(r.f_ccw, 0.2);
  const auto perf = performance_db(r, {});
  EXPECT_LT(perf.il_db, 0.3);
  EXPECT_GT(perf.is_db, 14.0);
}

TEST(OperatingPoint, MirroredFluxSwapsDirection) {
  const auto p = fixture::fitted();
  const auto sector = QuasiparticleSector::from_id(0);
  const BiasPoint mirrored{2.0 * std::numbers::pi - fixture::kPhiOpt, fixture::kNgOpt};
  const auto a = circulation_fidelities(
      smatrix_adiabatic(p, fixture::operating_bias(), sector, fixture::kFOpt).s);
  const auto b = circulation_fidelities(smatrix_adiabatic(p, mirrored, sector, fixture::kFOpt).s);
  EXPECT_NEAR(a.f_cw, b.f_ccw, 1e-9);
  EXPECT_NEAR(a.f_ccw, b.f_cw, 1e-9);
  EXPECT_NEAR(a.r_avg, b.r_avg, 1e-9);
}

TEST(OperatingPoint, FrequencySweepBandwidth) {
  const auto p = fixture::fitted();
  const auto es = solve_loop(p, fixture::operating_bias(), QuasiparticleSector::from_id(0));
  const auto grid = frequency_grid(7.0, 7.5, 2.0);
  const auto sweep = frequency_sweep(es, p, grid, ScatteringMethod::kAdiabatic);
  ASSERT_EQ(sweep.size(), grid.size());
  std::vector<FrequencyPoint> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pts.push_back({grid[i], circulation_fidelities(sweep[i].s)});
  }
  const auto perf = performance_db(pts[0].fidelity, pts);
  // Measured: IL < 1 dB over 90 MHz.
  EXPECT_GT(perf.bandwidth_il_mhz, 60.0);
  EXPECT_LT(perf.bandwidth_il_mhz, 120.0);
  EXPECT_GT(perf.bandwidth_is_mhz, 0.0);
}

OptimizerOptions small_budget() {
  OptimizerOptions o;
  o.starts = 2;
  o.max_evals = 60;
  o.screen_flux = 12;
  o.screen_charge = 3;
  o.screen_freq = 7;
  o.seed = 42;
  o.verify_full = false;
  return o;
}

TEST(Optimizer, ReproducibleAndReevaluable) {
  const auto p = fixture::fitted();
  const auto sector = QuasiparticleSector::from_id(0);
  const auto a = optimize_bias(p, sector, small_budget());
  const auto b = optimize_bias(p, sector, small_budget());
  EXPECT_EQ(a.fidelity, b.fidelity);
  EXPECT_EQ(a.bias.phi_x, b.bias.phi_x);
  EXPECT_EQ(a.bias.n_g, b.bias.n_g);
  EXPECT_EQ(a.f_ghz, b.f_ghz);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].fidelity, b.trace[i].fidelity);
    EXPECT_EQ(a.trace[i].phi_x, b.trace[i].phi_x);
  }
  ASSERT_EQ(a.starts.size(), 2u);
  EXPECT_LE(a.evaluations, 2 * 60 + 12 * 3 * 3 * 7);
  const double again =
      circulation_fidelities(smatrix_adiabatic(p, a.bias, sector, a.f_ghz).s).f_cw;
  EXPECT_NEAR(again, a.fidelity, 1e-6);
  EXPECT_TRUE(std::isnan(a.fidelity_full));
  EXPECT_GE(a.bias.n_g[0], 0.0);
  EXPECT_LE(a.bias.n_g[1], 2.0);
  EXPECT_GE(a.bias.phi_x, 0.0);
  EXPECT_LT(a.bias.phi_x, 2.0 * std::numbers::pi);

  auto other = small_budget();
  other.seed = 43;
  const auto c = optimize_bias(p, sector, other);
  EXPECT_NE(c.trace.front().phi_x, a.trace.front().phi_x);
}

TEST(Optimizer, RejectsBadBudget) {
  auto o = small_budget();
  o.starts = 0;
  EXPECT_THROW(optimize_bias(fixture::fitted(), QuasiparticleSector::from_id(0), o),
               ValidationError);
  const std::vector<double> deltas{0.06};
  const std::vector<double> cx{75.0};
  EXPECT_THROW(fidelity_vs_spread_sweep(fixture::symmetric(), deltas, cx,
                                        QuasiparticleSector::from_id(0), small_budget()),
               ValidationError);
}

TEST(Saturation, EstimateArithmetic) {
  EigenSystem es;
  es.omega = Eigen::Vector3d(0.0, 7.25, 7.6);
  for (auto& q : es.q) q = MatrixXc::Zero(3, 3);
  es.q[1](2, 0) = std::sqrt(0.3);
  es.q[0](1, 0) = std::sqrt(0.1);
  const auto est = saturation_estimate(es, 0.27, 7.25);
  EXPECT_NEAR(est.p_sat_dbm, -124.0, 2.0);
  EXPECT_NEAR(est.lifetime_ns, 1.0 / (0.27 * 0.3), 1e-9);
  EXPECT_EQ(est.level, 2);
  EXPECT_EQ(est.port, 1);
  const auto doubled = saturation_estimate(es, 0.54, 7.25);
  EXPECT_NEAR(doubled.p_sat_dbm - est.p_sat_dbm, 10.0 * std::log10(2.0), 1e-12);

  for (auto& q : es.q) q.setZero();
  EXPECT_THROW(saturation_estimate(es, 0.27, 7.25), ValidationError);
}

TEST(Saturation, DriveAmplitudeIsPhotonFlux) {
  const double p = -120.0;
  const double flux_per_ns = dbm_to_watts(p) / (kPlanck * 7.46e9) * 1e-9;
  EXPECT_NEAR(std::pow(drive_amplitude(p, 7.46), 2), flux_per_ns / kTwoPi, 1e-15);
  EXPECT_NEAR(std::pow(drive_amplitude(p, 7.46, {true}), 2), flux_per_ns, 1e-15);
  EXPECT_THROW(drive_amplitude(p, 0.0), ValidationError);
}

TEST(Saturation, PowerSweepCompresses) {
  const auto p = fixture::fitted();
  std::vector<double> powers;
  for (double dbm = -145.0; dbm <= -95.0; dbm += 5.0) powers.push_back(dbm);
  const auto rep = power_sweep(p, fixture::operating_bias(), QuasiparticleSector::from_id(0),
                               7.46, powers);
  ASSERT_EQ(rep.points.size(), powers.size());
  for (const auto& w : rep.warnings) EXPECT_EQ(w.find("plateau"), std::string::npos) << w;
  EXPECT_EQ(rep.points.front().db_drop, 0.0);
  EXPECT_TRUE(rep.bracketed);
  EXPECT_GT(rep.p3db_dbm, powers.front());
  EXPECT_LT(rep.p3db_dbm, powers.back());
  // Degrades monotonically from the plateau up to 10 dB past the 3 dB point.
  // Deep in saturation the ccw fidelity recovers a little, so stop there.
  bool past = false;
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    if (rep.points[i].p_dbm > rep.p3db_dbm + 10.0) break;
    if (rep.points[i].db_drop > 0.1) past = true;
    if (past) EXPECT_GE(rep.points[i].db_drop, rep.points[i - 1].db_drop - 1e-9);
    EXPECT_GE(rep.points[i].excited_population, rep.points[i - 1].excited_population);
  }
  const std::vector<double> bad{-120.0, -130.0};
  EXPECT_THROW(power_sweep(p, fixture::operating_bias(), QuasiparticleSector::from_id(0), 7.46,
                           bad),
               ValidationError);
}

}  // namespace
}  // namespace fanocirc
