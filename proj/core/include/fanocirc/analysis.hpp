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

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fanocirc/device.hpp"
#include "fanocirc/dynamics.hpp"
#include "fanocirc/types.hpp"

namespace fanocirc {

enum class Direction { kClockwise, kCounterClockwise };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

struct FidelityReport {
  double f_cw = 0.0;
  double f_ccw = 0.0;
  double r_avg = 0.0;
  /// |S21|, |S32|, |S13|.
  std::array<double, 3> cw_terms{};
  /// |S12|, |S23|, |S31|.
  std::array<double, 3> ccw_terms{};
  /// |S11|, |S22|, |S33|.
  std::array<double, 3> refl_terms{};

  [[nodiscard]] double value(Direction d) const {
    return d == Direction::kClockwise ? f_cw : f_ccw;
  }
};

FidelityReport circulation_fidelities(const Matrix3c& s);

/// -20 log10(f); +inf at f == 0.
double loss_db(double f);

struct FrequencyPoint {
  double f_ghz = 0.0;
  FidelityReport fidelity;
};

struct PerformanceReport {
  double il_db = 0.0;
  double is_db = 0.0;
  double r_db = 0.0;
  /// Longest contiguous interval with IL below the threshold, MHz.
  double bandwidth_il_mhz = 0.0;
  /// Longest contiguous interval with IS above the threshold, MHz.
  double bandwidth_is_mhz = 0.0;
};

struct BandwidthThresholds {
  double il_max_db = 1.0;
  double is_min_db = 14.0;
};

PerformanceReport performance_db(const FidelityReport& report,
                                 std::span<const FrequencyPoint> sweep,
                                 const BandwidthThresholds& thresholds = {});

/// Length of the longest run where `metric` is below `limit` (or above when
/// `above`), with linear interpolation of the crossings, in the units of `x`.
double contiguous_width(std::span<const double> x, std::span<const double> metric, double limit,
                        bool above);

/// Inclusive grid from f_min to f_max in steps of step_mhz.
std::vector<double> frequency_grid(double f_min_ghz, double f_max_ghz, double step_mhz);

std::vector<ScatteringMatrix> frequency_sweep(const EigenSystem& es, const DeviceParams& params,
                                              std::span<const double> f_ghz,
                                              ScatteringMethod method,
                                              const DriveOptions& drive = {});

struct OptimizerOptions {
  Direction direction = Direction::kClockwise;
  int starts = 8;
  std::uint64_t seed = 1;
  /// Objective evaluations per simplex run.
  int max_evals = 600;
  /// Charge biases are searched on [0, n_g_max]^2; 2 spans one full period cell.
  double n_g_max = 2.0;
  /// Drive frequency is searched within this window around omega_1, GHz.
  double detuning_window_ghz = 1.0;
  /// Start-point screen: flux x charge x charge grid, frequencies per point.
  int screen_flux = 48;
  int screen_charge = 6;
  int screen_freq = 31;
  double x_tol = 1e-6;
  double f_tol = 1e-9;
  /// Re-evaluate the optimum through the full master equation.
  bool verify_full = true;
  RateConvention rates;
};

struct TraceEntry {
  int start = 0;
  int eval = 0;
  double phi_x = 0.0;
  double n_g1 = 0.0;
  double n_g2 = 0.0;
  double f_ghz = 0.0;
  double fidelity = 0.0;
};

struct StartSummary {
  double initial = 0.0;
  double final = 0.0;
  int evals = 0;
  bool converged = false;
};

struct OptimizationResult {
  BiasPoint bias;
  double f_ghz = 0.0;
  /// Objective value from the adiabatic path.
  double fidelity = 0.0;
  /// Full master-equation value at the optimum (NaN when not verified).
  double fidelity_full = std::numeric_limits<double>::quiet_NaN();
  FidelityReport report;
  bool converged = false;
  int evaluations = 0;
  std::vector<StartSummary> starts;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;
};

OptimizationResult optimize_bias(const DeviceParams& params, const QuasiparticleSector& sector,
                                 const OptimizerOptions& options = {});

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Downhill simplex minimizer; trial points are projected onto [lower, upper].
/// Stops at max_evals calls, except that the n+1 starting vertices are always evaluated.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          int max_evals, double x_tol, double f_tol);

struct SpreadRow {
  double delta = 0.0;
  double c_x_ff = 0.0;
  /// Full master-equation value at the optimum, or the adiabatic one when
  /// verification is off.
  double fidelity = 0.0;
  BiasPoint bias;
  double f_ghz = 0.0;
  bool converged = false;
};

std::vector<SpreadRow> fidelity_vs_spread_sweep(const DeviceParams& base,
                                                std::span<const double> deltas,
                                                std::span<const double> c_x_ff,
                                                const QuasiparticleSector& sector,
                                                const OptimizerOptions& options = {});

struct PowerPoint {
  double p_dbm = 0.0;
  double fidelity = 0.0;
  /// |20 log10(F / F_low)| relative to the lowest-power point.
  double db_drop = 0.0;
  double excited_population = 0.0;
};

struct SaturationEstimate {
  double p_sat_dbm = 0.0;
  double lifetime_ns = 0.0;
  double matrix_element_sq = 0.0;
  int level = 0;
  int port = 0;
};

/// One drive photon per excited-state lifetime, using the largest
/// ground-to-excited charge matrix element. Gamma is an ordinary rate here.
SaturationEstimate saturation_estimate(const EigenSystem& es, double gamma_ghz, double f_ghz);

struct SaturationReport {
  double p3db_dbm = std::numeric_limits<double>::quiet_NaN();
  bool bracketed = false;
  std::vector<PowerPoint> points;
  SaturationEstimate estimate;
  std::vector<std::string> warnings;
};

double dbm_to_watts(double p_dbm);
double watts_to_dbm(double p_w);

/// Per-port drive amplitude for an incident power, sqrt(GHz) in the
/// ordinary-rate units used by the coupling operators.
double drive_amplitude(double p_dbm, double f_ghz, const RateConvention& rates = {});

SaturationReport power_sweep(const DeviceParams& params, const BiasPoint& bias,
                             const QuasiparticleSector& sector, double f_ghz,
                             std::span<const double> power_dbm,
                             Direction direction = Direction::kCounterClockwise,
                             const RateConvention& rates = {});

}  // namespace fanocirc
