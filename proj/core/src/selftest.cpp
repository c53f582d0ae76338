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
#include <functional>
#include <random>
#include <sstream>

#include "fanocirc/analysis.hpp"
#include "fanocirc/selftest.hpp"

namespace fanocirc {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Check {
  std::vector<SelfTestCase>& out;

  void operator()(const std::string& name, const std::function<double()>& measure,
                  double tol) const {
    SelfTestCase c{name, false, ""};
    try {
      const double err = measure();
      std::ostringstream msg;
      msg << "error " << err << " (tolerance " << tol << ")";
      c.detail = msg.str();
      c.passed = err <= tol;
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    out.push_back(c);
  }
};

DeviceParams small_device() {
  DeviceParams p;
  p.e_j_ghz = {14.73, 15.15, 15.22};
  p.c_x_ff = 76.0;
  p.n_cut = 5;
  return p;
}

BiasPoint random_bias(std::mt19937_64& rng) {
  BiasPoint b;
  b.phi_x = uniform(rng, 0.0, kTwoPi);
  b.n_g = {uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0), uniform(rng, -1.0, 1.0)};
  return b;
}

}  // namespace

std::vector<SelfTestCase> run_selftest() {
  std::vector<SelfTestCase> out;
  const Check check{out};
  std::mt19937_64 rng(20260101);
  const DeviceParams dev = small_device();
  const QuasiparticleSector sec = QuasiparticleSector::from_id(0);

  check("hamiltonian_hermitian", [&] {
    const MatrixXc h = build_loop_hamiltonian(dev, random_bias(rng), sec).matrix;
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
  }, 1e-12);

  check("charge_gauge_invariance", [&] {
    BiasPoint b = random_bias(rng);
    const EigenSystem a = solve_loop(dev, b, sec);
    const double shift = uniform(rng, -3.0, 3.0);
    for (double& g : b.n_g) g += shift;
    return (solve_loop(dev, b, sec).energies - a.energies).cwiseAbs().maxCoeff();
  }, 1e-10);

  check("flux_periodicity", [&] {
    BiasPoint b = random_bias(rng);
    const EigenSystem a = solve_loop(dev, b, sec);
    b.phi_x += kTwoPi;
    return (solve_loop(dev, b, sec).energies - a.energies).cwiseAbs().maxCoeff();
  }, 1e-10);

  check("charge_operators_sum_to_zero", [&] {
    const EigenSystem es = solve_loop(dev, random_bias(rng), sec);
    return (es.q[0] + es.q[1] + es.q[2]).cwiseAbs().maxCoeff();
  }, 1e-10);

  check("waveguide_unitarity", [&] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Matrix6c a = waveguide_smatrix_limit(uniform(rng, 0.0, 1.0)).a;
      worst = std::max(worst, (a.adjoint() * a - Matrix6c::Identity()).cwiseAbs().maxCoeff());
    }
    return worst;
  }, 1e-12);

  check("waveguide_limit_matches_finite", [&] {
    const double z = shunt_coupling(7.25, 50.0, 75.0);
    const Matrix6c lim = waveguide_smatrix_limit(z).a;
    const Matrix6c fin =
        waveguide_smatrix_finite(7.25, 50.0, build_capacitance_matrix(75.0, 1e8)).a;
    return (lim - fin).cwiseAbs().maxCoeff();
  }, 1e-6);

  check("zero_shunt_reduction", [&] {
    DeviceParams p = dev;
    p.c_x_ff = 0.0;
    const EigenSystem es = solve_loop(p, random_bias(rng), sec);
    const ComposedSystem cs = compose_device(es, p, 7.25, Vector3c::Zero());
    return std::max((cs.s_wl - Matrix3c::Identity()).cwiseAbs().maxCoeff(),
                    cs.h_s.cwiseAbs().maxCoeff());
  }, 1e-14);

  check("liouvillian_trace_preservation", [&] {
    const EigenSystem es = solve_loop(dev, random_bias(rng), sec);
    const Vector3c alpha(cplx(0.01, 0.0), cplx(0.0, 0.02), cplx(-0.01, 0.01));
    const Liouvillian lv = build_liouvillian(compose_device(es, dev, 7.3, alpha), 7.3);
    MatrixXc x = MatrixXc::Random(lv.dim, lv.dim);
    MatrixXc rho = x * x.adjoint();
    rho /= rho.trace();
    return std::abs(lv.apply(rho).trace());
  }, 1e-10);

  check("steady_state_physical", [&] {
    const EigenSystem es = solve_loop(dev, random_bias(rng), sec);
    const Vector3c alpha(cplx(0.05, 0.0), 0.0, 0.0);
    const SteadyState ss = steady_state(build_liouvillian(compose_device(es, dev, 7.3, alpha), 7.3));
    const double herm = (ss.rho - ss.rho.adjoint()).cwiseAbs().maxCoeff();
    const double trace = std::abs(ss.rho.trace() - 1.0);
    const double negativity = std::max(0.0, -ss.min_eigenvalue - 1e-8);
    return std::max({herm, trace, negativity});
  }, 1e-10);

  check("reciprocity_at_zero_flux", [&] {
    BiasPoint b = random_bias(rng);
    b.phi_x = 0.0;
    const EigenSystem es = solve_loop(dev, b, sec);
    const Matrix3c s = smatrix_adiabatic(es, dev, es.omega(1)).s;
    return (s - s.transpose()).cwiseAbs().maxCoeff();
  }, 1e-6);

  check("passivity", [&] {
    const EigenSystem es = solve_loop(dev, random_bias(rng), sec);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Matrix3c s = smatrix_adiabatic(es, dev, es.omega(1) + uniform(rng, -0.3, 0.3)).s;
      worst = std::max(worst, Eigen::JacobiSVD<Matrix3c>(s).singularValues()(0) - 1.0);
    }
    return std::max(0.0, worst);
  }, 1e-3);

  check("adiabatic_matches_full", [&] {
    const EigenSystem es = solve_loop(dev, random_bias(rng), sec);
    const double f = es.omega(1) + 0.02;
    return (smatrix_adiabatic(es, dev, f).s - smatrix_full(es, dev, f).s).cwiseAbs().maxCoeff();
  }, 1e-2);

  return out;
}

}  // namespace fanocirc
