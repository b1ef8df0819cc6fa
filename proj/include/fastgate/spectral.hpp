// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fastgate/config.hpp"

namespace fastgate {

/// One oscillating basis function exp(i (W t + chirp_sign * phi(t))).
struct Frequency {
  double w = 0.0;  // rad/s
  int chirp_sign = 0;
};

/// Integrals of the drive envelope against a set of oscillating basis
/// functions, for a single interval [t0, t1].
///
///   increments[k] = K_k(t1) - K_k(t0),   K_k(t) = int_0^t Omega(s) e^{i W_k s} ds
///   cross[k][l]   = int_{t0}^{t1} (K_k(t) - K_k(t0))^* dK_l(t)
///
/// `cross` is only filled for k, l < cross_count.
struct IntervalIntegrals {
  std::vector<cplx> increments;
  std::vector<cplx> cross;  // row-major cross_count x cross_count
  std::size_t cross_count = 0;

  cplx cross_at(std::size_t k, std::size_t l) const { return cross[k * cross_count + l]; }
};

/// Evaluates IntervalIntegrals for a piecewise-linear envelope. On each
/// linear piece the single integrals use closed forms; the cross terms use
/// composite Gauss-Legendre quadrature on sub-intervals short enough that
/// the integrand phase advances by at most ~3 rad. With a phase
/// perturbation, everything falls back to nested quadrature.
class SpectralIntegrator {
 public:
  SpectralIntegrator(std::vector<LinearPiece> pieces, double omega_peak,
                     std::vector<Frequency> frequencies, std::size_t cross_count,
                     std::function<double(double)> phase_perturbation = {});

  IntervalIntegrals integrate(double t0, double t1) const;

  const std::vector<Frequency>& frequencies() const { return freqs_; }

 private:
  void integrate_piece(const LinearPiece& piece, double a0, double b0, std::vector<cplx>& acc,
                       std::vector<cplx>& cross) const;

  std::vector<LinearPiece> pieces_;
  double omega_peak_;
  std::vector<Frequency> freqs_;
  std::size_t cross_count_;
  std::function<double(double)> phase_;
  double max_rate_ = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

/// int_0^L e^{i w s} ds and int_0^L s e^{i w s} ds, stable as w L -> 0.
cplx exp_moment0(double w, double length);
cplx exp_moment1(double w, double length);

}  // namespace fastgate
