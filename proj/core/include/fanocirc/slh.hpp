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

// (S, L, H) triples for open quantum networks with scalar scattering
// entries. All operators act on one shared Hilbert space (the retained loop
// eigenbasis).

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "fanocirc/network.hpp"
#include "fanocirc/types.hpp"

namespace fanocirc {

struct SLHTriple {
  MatrixXc s;
  std::vector<MatrixXc> l;
  MatrixXc h;

  [[nodiscard]] int ports() const { return static_cast<int>(s.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(h.rows()); }

  /// Throws ValidationError on inconsistent shapes or non-Hermitian H.
  void validate() const;
};

/// (1, 0, 0) with `ports` ports on a `dim`-dimensional space.
SLHTriple identity_triple(int ports, int dim);

/// Series product: the outputs of `g1` feed the inputs of `g2`.
///   S = S2 S1,  L = L2 + S2 L1,  H = H1 + H2 - i/2 (L2^dag S2 L1 - h.c.)
SLHTriple series(const SLHTriple& g2, const SLHTriple& g1);

/// Concatenation: block-diagonal S, stacked L, summed H.
SLHTriple concat(const SLHTriple& a, const SLHTriple& b);

/// Feeds output port out_ports[k] back into input port in_ports[k] and
/// eliminates them. `context` is appended to the error raised when
/// (1 - S_internal) is singular.
SLHTriple feedback_reduce(const SLHTriple& g, std::span<const int> out_ports,
                          std::span<const int> in_ports, std::string_view context = {});

/// Drive -> (waveguide <-feedback- loop) network, with the total Hamiltonian
/// split into its loop, shift and drive parts. Operators are in GHz units
/// (H) and sqrt(GHz) units (L); nothing is scaled by 2*pi here.
struct ComposedSystem {
  Matrix3c s_wl = Matrix3c::Identity();
  std::array<MatrixXc, 3> l_wl;
  /// A22 (1 - A22)^{-1}; kept for the per-level shift/decay rates.
  Matrix3c a_s = Matrix3c::Zero();
  std::array<MatrixXc, 3> l_loop;
  MatrixXc h_loop_rot;
  MatrixXc h_s;
  MatrixXc h_d;
  std::array<MatrixXc, 3> l_tot;
  MatrixXc h_tot_rot;
  Vector3c alpha = Vector3c::Zero();

  [[nodiscard]] int dim() const { return static_cast<int>(h_loop_rot.rows()); }
};

ComposedSystem compose_circulator(const WaveguideScattering& a,
                                  const std::array<MatrixXc, 3>& l_loop,
                                  const MatrixXc& h_loop_rot, const Vector3c& alpha);

/// sum_ij m_ij a_i^dag b_j.
MatrixXc bilinear(std::span<const MatrixXc> a, const MatrixXc& m, std::span<const MatrixXc> b);

/// -i/2 (X - X^dag); Hermitian for any X.
MatrixXc im_part(const MatrixXc& x);

}  // namespace fanocirc
