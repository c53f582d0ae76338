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

#include "fanocirc/slh.hpp"

#include <numeric>
#include <sstream>
#include <string>

namespace fanocirc {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw ValidationError(what);
}

// (1 - m)^{-1} with a conditioning check.
MatrixXc feedback_resolvent(const MatrixXc& m, std::string_view context) {
  const MatrixXc one_minus = MatrixXc::Identity(m.rows(), m.cols()) - m;
  const Eigen::PartialPivLU<MatrixXc> lu(one_minus);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) {
    std::ostringstream msg;
    msg << "feedback resolvent (1 - S_internal) is singular (rcond=" << rcond << ")";
    if (!context.empty()) msg << " " << context;
    throw SolverError(msg.str());
  }
  return lu.inverse();
}

}  // namespace

MatrixXc bilinear(std::span<const MatrixXc> a, const MatrixXc& m, std::span<const MatrixXc> b) {
  require(static_cast<Eigen::Index>(a.size()) == m.rows() &&
              static_cast<Eigen::Index>(b.size()) == m.cols(),
          "bilinear: coefficient shape does not match operator vectors");
  const Eigen::Index dim = a.empty() ? 0 : a.front().rows();
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (std::size_t j = 0; j < b.size(); ++j) {
    MatrixXc weighted = MatrixXc::Zero(dim, dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const cplx c = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c != cplx{}) weighted += std::conj(c) * a[i];
    }
    // (sum_i conj(m_ij) a_i)^dag b_j
    out.noalias() += weighted.adjoint() * b[j];
  }
  return out;
}

MatrixXc im_part(const MatrixXc& x) { return -0.5 * kI * (x - x.adjoint()); }

void SLHTriple::validate() const {
  require(s.rows() == s.cols(), "SLH: S must be square");
  require(static_cast<Eigen::Index>(l.size()) == s.rows(), "SLH: one coupling operator per port");
  require(h.rows() == h.cols(), "SLH: H must be square");
  for (const auto& op : l) {
    require(op.rows() == h.rows() && op.cols() == h.cols(), "SLH: operator dimension mismatch");
  }
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
  require(h.size() == 0 || (h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "SLH: H must be Hermitian");
}

SLHTriple identity_triple(int ports, int dim) {
  SLHTriple g;
  g.s = MatrixXc::Identity(ports, ports);
  g.l.assign(ports, MatrixXc::Zero(dim, dim));
  g.h = MatrixXc::Zero(dim, dim);
  return g;
}

SLHTriple series(const SLHTriple& g2, const SLHTriple& g1) {
  if (g1.ports() != g2.ports()) {
    throw ValidationError("series: port counts differ (" + std::to_string(g2.ports()) + " vs " +
                          std::to_string(g1.ports()) + ")");
  }
  require(g1.dim() == g2.dim(), "series: operator dimensions differ");
  const int n = g1.ports();
  SLHTriple out;
  out.s = g2.s * g1.s;
  out.l.resize(n);
  for (int i = 0; i < n; ++i) {
    out.l[i] = g2.l[i];
    for (int k = 0; k < n; ++k) {
      if (g2.s(i, k) != cplx{}) out.l[i] += g2.s(i, k) * g1.l[k];
    }
  }
  out.h = g1.h + g2.h + im_part(bilinear(g2.l, g2.s, g1.l));
  return out;
}

SLHTriple concat(const SLHTriple& a, const SLHTriple& b) {
  require(a.dim() == b.dim(), "concat: operator dimensions differ");
  const int na = a.ports();
  const int nb = b.ports();
  SLHTriple out;
  out.s = MatrixXc::Zero(na + nb, na + nb);
  out.s.topLeftCorner(na, na) = a.s;
  out.s.bottomRightCorner(nb, nb) = b.s;
  out.l = a.l;
  out.l.insert(out.l.end(), b.l.begin(), b.l.end());
  out.h = a.h + b.h;
  return out;
}

SLHTriple feedback_reduce(const SLHTriple& g, std::span<const int> out_ports,
                          std::span<const int> in_ports, std::string_view context) {
  const int n = g.ports();
  const int k = static_cast<int>(out_ports.size());
  require(in_ports.size() == out_ports.size(), "feedback_reduce: port lists differ in length");
  require(k >= 1 && k < n, "feedback_reduce: must keep at least one external port");

  // Order ports as [external..., internal...] on both sides.
  auto order = [&](std::span<const int> internal) {
    std::vector<bool> used(n, false);
    for (int p : internal) {
      require(p >= 0 && p < n && !used[p], "feedback_reduce: invalid or repeated port index");
      used[p] = true;
    }
    std::vector<int> perm;
    for (int p = 0; p < n; ++p) {
      if (!used[p]) perm.push_back(p);
    }
    perm.insert(perm.end(), internal.begin(), internal.end());
    return perm;
  };
  const std::vector<int> rows = order(out_ports);
  const std::vector<int> cols = order(in_ports);
  const int m = n - k;

  MatrixXc sp(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sp(i, j) = g.s(rows[i], cols[j]);
  }
  const MatrixXc s11 = sp.topLeftCorner(m, m);
  const MatrixXc s12 = sp.topRightCorner(m, k);
  const MatrixXc s21 = sp.bottomLeftCorner(k, m);
  const MatrixXc s22 = sp.bottomRightCorner(k, k);
  std::vector<MatrixXc> l1, l2;
  for (int i = 0; i < m; ++i) l1.push_back(g.l[rows[i]]);
  for (int i = m; i < n; ++i) l2.push_back(g.l[rows[i]]);

  const MatrixXc res = feedback_resolvent(s22, context);
  const MatrixXc through = s12 * res;

  SLHTriple out;
  out.s = s11 + through * s21;
  out.l.resize(m);
  for (int i = 0; i < m; ++i) {
    out.l[i] = l1[i];
    for (int j = 0; j < k; ++j) out.l[i] += through(i, j) * l2[j];
  }
  // H + Im{(L1^dag S12 + L2^dag S22)(1 - S22)^{-1} L2}
  out.h = g.h + im_part(bilinear(l1, through, l2) + bilinear(l2, s22 * res, l2));
  return out;
}

ComposedSystem compose_circulator(const WaveguideScattering& a,
                                  const std::array<MatrixXc, 3>& l_loop,
                                  const MatrixXc& h_loop_rot, const Vector3c& alpha) {
  const Eigen::Index d = h_loop_rot.rows();
  for (const auto& op : l_loop) {
    require(op.rows() == d && op.cols() == d, "compose_circulator: operator dimension mismatch");
  }

  std::ostringstream ctx;
  ctx << "(shunt coupling z=" << a.z << ")";
  const MatrixXc res = feedback_resolvent(a.a22(), ctx.str());

  ComposedSystem cs;
  cs.l_loop = l_loop;
  cs.h_loop_rot = h_loop_rot;
  cs.alpha = alpha;
  const Matrix3c through = a.a12() * res;
  cs.s_wl = a.a11() + through * a.a21();
  cs.a_s = a.a22() * res;
  for (int i = 0; i < 3; ++i) {
    cs.l_wl[i] = MatrixXc::Zero(d, d);
    for (int j = 0; j < 3; ++j) cs.l_wl[i] += through(i, j) * l_loop[j];
  }
  cs.h_s = im_part(bilinear(l_loop, cs.a_s, l_loop));

  const Vector3c beta = cs.s_wl * alpha;
  MatrixXc drive = MatrixXc::Zero(d, d);
  for (int i = 0; i < 3; ++i) drive += beta(i) * cs.l_wl[i].adjoint();
  cs.h_d = im_part(drive);
  for (int i = 0; i < 3; ++i) {
    cs.l_tot[i] = cs.l_wl[i] + beta(i) * MatrixXc::Identity(d, d);
  }
  cs.h_tot_rot = cs.h_loop_rot + cs.h_s + cs.h_d;
  return cs;
}

}  // namespace fanocirc
