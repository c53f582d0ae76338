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

#include "fanocirc/analysis.hpp"
#include "fanocirc/parallel.hpp"

namespace fanocirc {

double dbm_to_watts(double p_dbm) { return 1e-3 * std::pow(10.0, p_dbm / 10.0); }

double watts_to_dbm(double p_w) { return 10.0 * std::log10(p_w / 1e-3); }

double drive_amplitude(double p_dbm, double f_ghz, const RateConvention& rates) {
  if (!(f_ghz > 0.0)) throw ValidationError("drive frequency must be > 0");
  // Photon flux P / (h f) in 1/s, expressed per ns and divided by the factor
  // the Liouvillian applies to every coupling rate.
  const double flux_per_ns = dbm_to_watts(p_dbm) / (kPlanck * f_ghz * 1e9) * 1e-9;
  return std::sqrt(flux_per_ns / rates.rate_scale());
}

SaturationEstimate saturation_estimate(const EigenSystem& es, double gamma_ghz, double f_ghz) {
  if (!(gamma_ghz > 0.0)) throw ValidationError("saturation_estimate: Gamma must be > 0");
  if (!(f_ghz > 0.0)) throw ValidationError("saturation_estimate: frequency must be > 0");
  SaturationEstimate est;
  for (int j = 0; j < 3; ++j) {
    for (int k = 1; k < es.n_levels(); ++k) {
      const double m2 = std::norm(es.q[j](k, 0));
      if (m2 > est.matrix_element_sq) {
        est.matrix_element_sq = m2;
        est.level = k;
        est.port = j;
      }
    }
  }
  if (!(est.matrix_element_sq > 1e-14)) {
    throw ValidationError("saturation_estimate: no excited level couples to the ground state");
  }
  est.lifetime_ns = 1.0 / (gamma_ghz * est.matrix_element_sq);
  const double p_w = kPlanck * f_ghz * 1e9 / (est.lifetime_ns * 1e-9);
  est.p_sat_dbm = watts_to_dbm(p_w);
  return est;
}

SaturationReport power_sweep(const DeviceParams& params, const BiasPoint& bias,
                             const QuasiparticleSector& sector, double f_ghz,
                             std::span<const double> power_dbm, Direction direction,
                             const RateConvention& rates) {
  if (power_dbm.size() < 2) throw ValidationError("power_dbm needs at least two points");
  for (std::size_t i = 1; i < power_dbm.size(); ++i) {
    if (!(power_dbm[i] > power_dbm[i - 1])) {
      throw ValidationError("power_dbm must be strictly increasing");
    }
  }
  const EigenSystem es = solve_loop(params, bias, sector);
  SaturationReport rep;
  rep.warnings = es.warnings;
  rep.estimate = saturation_estimate(es, params.gamma_ghz, f_ghz);

  rep.points.resize(power_dbm.size());
  parallel_for(power_dbm.size(), [&](std::size_t i) {
    DriveOptions drive;
    drive.rates = rates;
    drive.alpha_mag = drive_amplitude(power_dbm[i], f_ghz, rates);
    const ScatteringMatrix s = smatrix_full(es, params, f_ghz, drive);
    rep.points[i].p_dbm = power_dbm[i];
    rep.points[i].fidelity = circulation_fidelities(s.s).value(direction);
    rep.points[i].excited_population = s.max_excited_population;
  });

  const double f_low = rep.points.front().fidelity;
  const double f_lin =
      circulation_fidelities(smatrix_adiabatic(es, params, f_ghz, rates).s).value(direction);
  if (std::abs(f_low - f_lin) > 1e-2) {
    std::ostringstream msg;
    msg << "low-power plateau not reached: F=" << f_low << " at " << power_dbm.front()
        << " dBm vs linear response " << f_lin;
    rep.warnings.push_back(msg.str());
  }
  for (auto& pt : rep.points) pt.db_drop = std::abs(20.0 * std::log10(pt.fidelity / f_low));
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const PowerPoint& a = rep.points[i - 1];
    const PowerPoint& b = rep.points[i];
    if (b.db_drop >= 3.0) {
      const double t = (3.0 - a.db_drop) / (b.db_drop - a.db_drop);
      rep.p3db_dbm = a.p_dbm + t * (b.p_dbm - a.p_dbm);
      rep.bracketed = true;
      break;
    }
  }
  if (!rep.bracketed) rep.warnings.push_back("3 dB compression point not within the power grid");
  return rep;
}

}  // namespace fanocirc
