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
#include <sstream>

#include "fanocirc/analysis.hpp"
#include "fanocirc/parallel.hpp"

namespace fanocirc {

std::string to_string(Direction d) { return d == Direction::kClockwise ? "cw" : "ccw"; }

Direction direction_from_string(const std::string& s) {
  if (s == "cw" || s == "clockwise") return Direction::kClockwise;
  if (s == "ccw" || s == "counterclockwise") return Direction::kCounterClockwise;
  throw ValidationError("direction must be cw or ccw, got '" + s + "'");
}

FidelityReport circulation_fidelities(const Matrix3c& s) {
  FidelityReport r;
  // Clockwise 1 -> 2 -> 3 -> 1; S(j, i) is the output at j for input at i.
  for (int i = 0; i < 3; ++i) {
    const int next = (i + 1) % 3;
    r.cw_terms[i] = std::abs(s(next, i));
    r.ccw_terms[i] = std::abs(s(i, next));
    r.refl_terms[i] = std::abs(s(i, i));
  }
  auto mean = [](const std::array<double, 3>& v) { return (v[0] + v[1] + v[2]) / 3.0; };
  r.f_cw = mean(r.cw_terms);
  r.f_ccw = mean(r.ccw_terms);
  r.r_avg = mean(r.refl_terms);
  return r;
}

double loss_db(double f) {
  if (f <= 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(f);
}

double contiguous_width(std::span<const double> x, std::span<const double> metric, double limit,
                        bool above) {
  if (x.size() != metric.size()) throw ValidationError("contiguous_width: size mismatch");
  const std::size_t n = x.size();
  auto inside = [&](std::size_t i) { return above ? metric[i] > limit : metric[i] < limit; };
  // Crossing point on segment (i, i+1) by linear interpolation.
  auto cross = [&](std::size_t i) {
    const double m0 = metric[i];
    const double m1 = metric[i + 1];
    if (!std::isfinite(m0) || !std::isfinite(m1) || m0 == m1) return 0.5 * (x[i] + x[i + 1]);
    return x[i] + (limit - m0) * (x[i + 1] - x[i]) / (m1 - m0);
  };
  double best = 0.0;
  std::size_t i = 0;
  while (i < n) {
    if (!inside(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && inside(j + 1)) ++j;
    const double lo = i > 0 ? cross(i - 1) : x[i];
    const double hi = j + 1 < n ? cross(j) : x[j];
    best = std::max(best, hi - lo);
    i = j + 1;
  }
  return best;
}

PerformanceReport performance_db(const FidelityReport& report,
                                 std::span<const FrequencyPoint> sweep,
                                 const BandwidthThresholds& thresholds) {
  PerformanceReport p;
  p.il_db = loss_db(report.f_cw);
  p.is_db = loss_db(report.f_ccw);
  p.r_db = -loss_db(report.r_avg);
  if (sweep.size() < 2) return p;
  std::vector<double> f, il, is;
  for (const auto& pt : sweep) {
    f.push_back(pt.f_ghz);
    il.push_back(loss_db(pt.fidelity.f_cw));
    is.push_back(loss_db(pt.fidelity.f_ccw));
  }
  p.bandwidth_il_mhz = 1e3 * contiguous_width(f, il, thresholds.il_max_db, false);
  p.bandwidth_is_mhz = 1e3 * contiguous_width(f, is, thresholds.is_min_db, true);
  return p;
}

std::vector<double> frequency_grid(double f_min_ghz, double f_max_ghz, double step_mhz) {
  if (!(step_mhz > 0.0)) throw ValidationError("f_step_mhz must be > 0");
  if (!(f_max_ghz >= f_min_ghz)) throw ValidationError("f_max_ghz must be >= f_min_ghz");
  const double step = step_mhz * 1e-3;
  const auto n = static_cast<long>(std::floor((f_max_ghz - f_min_ghz) / step + 1e-9)) + 1;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) grid[i] = f_min_ghz + static_cast<double>(i) * step;
  return grid;
}

std::vector<ScatteringMatrix> frequency_sweep(const EigenSystem& es, const DeviceParams& params,
                                              std::span<const double> f_ghz,
                                              ScatteringMethod method,
                                              const DriveOptions& drive) {
  std::vector<ScatteringMatrix> out(f_ghz.size());
  parallel_for(f_ghz.size(), [&](std::size_t i) {
    out[i] = method == ScatteringMethod::kFull ? smatrix_full(es, params, f_ghz[i], drive)
                                               : smatrix_adiabatic(es, params, f_ghz[i],
                                                                   drive.rates);
  });
  return out;
}

}  // namespace fanocirc
