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
#include <numeric>
#include <random>
#include <sstream>

#include "fanocirc/analysis.hpp"
#include "fanocirc/parallel.hpp"

namespace fanocirc {

namespace {

// Portable uniform on [0, 1): the standard distributions are not
// reproducible across library implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

struct Candidate {
  BiasPoint bias;
  double f_ghz = 0.0;
};

// Search coordinates: (phi_x, n_g1, n_g2, f - omega_1).
Candidate decode(const Eigen::VectorXd& x, const EigenSystem* es) {
  Candidate c;
  c.bias.phi_x = x(0);
  c.bias.n_g = {x(1), x(2), 0.0};
  c.f_ghz = (es ? es->omega(1) : 0.0) + x(3);
  return c;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                          int max_evals, double x_tol, double f_tol) {
  const Eigen::Index n = x0.size();
  SimplexResult out;
  std::vector<Eigen::VectorXd> pts(n + 1);
  std::vector<double> vals(n + 1);
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evals;
    return fn(x);
  };
  pts[0] = project(x0, lower, upper);
  vals[0] = eval(pts[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = pts[0];
    p(i) += step(i);
    if (p(i) > upper(i)) p(i) = pts[0](i) - step(i);
    pts[i + 1] = project(p, lower, upper);
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<int> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second = order[n - 1];

    double spread_x = 0.0;
    double spread_f = 0.0;
    for (int i : order) {
      spread_x = std::max(spread_x, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
      spread_f = std::max(spread_f, std::abs(vals[i] - vals[best]));
    }
    if (spread_x <= x_tol && spread_f <= f_tol) {
      out.converged = true;
      break;
    }
    if (out.evals >= max_evals) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i : order) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = project(2.0 * centroid - pts[worst], lower, upper);
    const double fr = eval(xr);
    if (fr < vals[best] && out.evals >= max_evals) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = project(3.0 * centroid - 2.0 * pts[worst], lower, upper);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (out.evals >= max_evals) {
      if (fr < vals[worst]) {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    // Outside or inside contraction.
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(0.5 * (centroid + xr))
                                       : Eigen::VectorXd(0.5 * (centroid + pts[worst]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i : order) {
      if (i == best || out.evals >= max_evals) continue;
      pts[i] = project(0.5 * (pts[best] + pts[i]), lower, upper);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  out.value = *it;
  out.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return out;
}

OptimizationResult optimize_bias(const DeviceParams& params, const QuasiparticleSector& sector,
                                 const OptimizerOptions& opt) {
  params.validate();
  if (opt.starts < 1) throw ValidationError("opt_starts must be >= 1");
  if (opt.max_evals < 5) throw ValidationError("opt_max_evals must be >= 5");
  if (!(opt.n_g_max > 0.0)) throw ValidationError("n_g_max must be > 0");
  if (!(opt.detuning_window_ghz > 0.0)) throw ValidationError("detuning window must be > 0");
  if (opt.screen_flux < 1 || opt.screen_charge < 1 || opt.screen_freq < 2) {
    throw ValidationError("screen grid sizes must be positive");
  }
  const Direction dir = opt.direction;
  const double window = opt.detuning_window_ghz;
  const double margin = std::min(0.3, window);

  std::mt19937_64 rng(opt.seed);
  const double jitter[3] = {unit_uniform(rng), unit_uniform(rng), unit_uniform(rng)};

  // Screen: every grid bias is scanned in drive frequency across its lowest
  // doublet, keeping the best fidelity and detuning.
  const int nf = opt.screen_flux;
  const int nc = opt.screen_charge;
  const std::size_t n_grid = static_cast<std::size_t>(nf) * nc * nc;
  auto grid_point = [&](std::size_t idx) {
    const int a = static_cast<int>(idx / (nc * nc));
    const int b = static_cast<int>((idx / nc) % nc);
    const int c = static_cast<int>(idx % nc);
    Eigen::VectorXd x(4);
    x << kTwoPi * (a + jitter[0]) / nf, opt.n_g_max * (b + jitter[1]) / nc,
        opt.n_g_max * (c + jitter[2]) / nc, 0.0;
    return x;
  };
  std::vector<double> screen_val(n_grid, 0.0);
  std::vector<double> screen_u(n_grid, 0.0);
  parallel_for(n_grid, [&](std::size_t idx) {
    const Eigen::VectorXd x = grid_point(idx);
    try {
      const EigenSystem es = solve_loop(params, decode(x, nullptr).bias, sector);
      const double hi = std::min(window, es.omega(2) - es.omega(1) + margin);
      for (int k = 0; k < opt.screen_freq; ++k) {
        const double u = -margin + (hi + margin) * k / (opt.screen_freq - 1);
        const double f =
            circulation_fidelities(smatrix_adiabatic(es, params, es.omega(1) + u, opt.rates).s)
                .value(dir);
        if (f > screen_val[idx]) {
          screen_val[idx] = f;
          screen_u[idx] = u;
        }
      }
    } catch (const std::exception&) {
      screen_val[idx] = 0.0;
    }
  });

  // Local maxima of the screen (flux periodic), best first; ties keep the
  // lower grid index.
  auto at = [&](int a, int b, int c) {
    return screen_val[(static_cast<std::size_t>((a + nf) % nf) * nc + b) * nc + c];
  };
  std::vector<std::size_t> peaks;
  for (std::size_t idx = 0; idx < n_grid; ++idx) {
    const int a = static_cast<int>(idx / (nc * nc));
    const int b = static_cast<int>((idx / nc) % nc);
    const int c = static_cast<int>(idx % nc);
    const double v = screen_val[idx];
    bool peak = at(a + 1, b, c) <= v && at(a - 1, b, c) <= v;
    if (b + 1 < nc) peak = peak && at(a, b + 1, c) <= v;
    if (b > 0) peak = peak && at(a, b - 1, c) <= v;
    if (c + 1 < nc) peak = peak && at(a, b, c + 1) <= v;
    if (c > 0) peak = peak && at(a, b, c - 1) <= v;
    if (peak) peaks.push_back(idx);
  }
  auto by_value = [&](std::size_t l, std::size_t r) {
    return screen_val[l] != screen_val[r] ? screen_val[l] > screen_val[r] : l < r;
  };
  std::sort(peaks.begin(), peaks.end(), by_value);
  std::vector<std::size_t> chosen(peaks.begin(),
                                  peaks.begin() + std::min<std::size_t>(peaks.size(), opt.starts));
  if (chosen.size() < static_cast<std::size_t>(opt.starts)) {
    std::vector<std::size_t> rest(n_grid);
    std::iota(rest.begin(), rest.end(), 0);
    std::sort(rest.begin(), rest.end(), by_value);
    for (std::size_t idx : rest) {
      if (chosen.size() >= static_cast<std::size_t>(opt.starts)) break;
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
  }

  Eigen::VectorXd lower(4), upper(4), step(4);
  const double inf = std::numeric_limits<double>::infinity();
  lower << -inf, 0.0, 0.0, -window;
  upper << inf, opt.n_g_max, opt.n_g_max, window;
  step << 0.1, 0.1 * opt.n_g_max / 2.0, 0.1 * opt.n_g_max / 2.0, 0.02;

  struct StartRun {
    SimplexResult simplex;
    StartSummary summary;
    std::vector<TraceEntry> trace;
  };
  std::vector<StartRun> runs(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t s) {
    StartRun& run = runs[s];
    auto objective = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd y = x;
      y(0) = std::fmod(y(0), kTwoPi);
      if (y(0) < 0.0) y(0) += kTwoPi;
      double f = 0.0;
      double f_ghz = 0.0;
      try {
        const EigenSystem es = solve_loop(params, decode(y, nullptr).bias, sector);
        f_ghz = decode(y, &es).f_ghz;
        f = circulation_fidelities(smatrix_adiabatic(es, params, f_ghz, opt.rates).s).value(dir);
      } catch (const std::exception&) {
        f = 0.0;
      }
      run.trace.push_back({static_cast<int>(s), static_cast<int>(run.trace.size()), y(0), y(1),
                           y(2), f_ghz, f});
      return -f;
    };
    Eigen::VectorXd x0 = grid_point(chosen[s]);
    x0(3) = screen_u[chosen[s]];
    run.simplex = nelder_mead(objective, x0, step, lower, upper, opt.max_evals, opt.x_tol,
                              opt.f_tol);
    run.summary.initial = run.trace.front().fidelity;
    run.summary.final = -run.simplex.value;
    run.summary.evals = run.simplex.evals;
    run.summary.converged = run.simplex.converged;
  });

  OptimizationResult res;
  std::size_t best = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    res.starts.push_back(runs[s].summary);
    res.evaluations += runs[s].simplex.evals;
    res.trace.insert(res.trace.end(), runs[s].trace.begin(), runs[s].trace.end());
    if (runs[s].summary.final > runs[best].summary.final) best = s;
    if (runs[s].summary.final > runs[s].summary.initial) res.converged = true;
  }
  if (!res.converged) res.warnings.push_back("no start improved on its initial point");

  Eigen::VectorXd xb = runs[best].simplex.x;
  xb(0) = std::fmod(xb(0), kTwoPi);
  if (xb(0) < 0.0) xb(0) += kTwoPi;
  const EigenSystem es = solve_loop(params, decode(xb, nullptr).bias, sector);
  const Candidate c = decode(xb, &es);
  res.bias = c.bias;
  res.f_ghz = c.f_ghz;
  res.report = circulation_fidelities(smatrix_adiabatic(es, params, c.f_ghz, opt.rates).s);
  res.fidelity = res.report.value(dir);
  for (const auto& w : es.warnings) res.warnings.push_back(w);

  if (opt.verify_full) {
    DriveOptions drive;
    drive.rates = opt.rates;
    const ScatteringMatrix full = smatrix_full(es, params, c.f_ghz, drive);
    res.fidelity_full = circulation_fidelities(full.s).value(dir);
    if (std::abs(res.fidelity_full - res.fidelity) > 1e-2) {
      std::ostringstream msg;
      msg << "full master-equation fidelity " << res.fidelity_full
          << " differs from the adiabatic value " << res.fidelity;
      res.warnings.push_back(msg.str());
    }
  }
  return res;
}

std::vector<SpreadRow> fidelity_vs_spread_sweep(const DeviceParams& base,
                                                std::span<const double> deltas,
                                                std::span<const double> c_x_ff,
                                                const QuasiparticleSector& sector,
                                                const OptimizerOptions& options) {
  for (double d : deltas) {
    if (!(d >= 0.0 && d <= 0.05)) {
      std::ostringstream msg;
      msg << "delta must lie in [0, 0.05], got " << d;
      throw ValidationError(msg.str());
    }
  }
  const double mean = (base.e_j_ghz[0] + base.e_j_ghz[1] + base.e_j_ghz[2]) / 3.0;
  std::vector<SpreadRow> rows;
  for (double d : deltas) {
    for (double cx : c_x_ff) rows.push_back({d, cx, 0.0, {}, 0.0, false});
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    SpreadRow& row = rows[i];
    DeviceParams p = base;
    p.e_j_ghz = junction_energies_from_spread(mean, row.delta);
    p.c_x_ff = row.c_x_ff;
    const OptimizationResult r = optimize_bias(p, sector, options);
    // Report the master-equation value when the optimum was re-verified.
    row.fidelity = std::isnan(r.fidelity_full) ? r.fidelity : r.fidelity_full;
    row.bias = r.bias;
    row.f_ghz = r.f_ghz;
    row.converged = r.converged;
  });
  return rows;
}

}  // namespace fanocirc
