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

#include "fastgate/ramsey.hpp"

#include <cmath>

namespace fastgate {

namespace {

using Matrix2 = std::array<std::array<cplx, 2>, 2>;

Matrix2 mul(const Matrix2& a, const Matrix2& b) {
  Matrix2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
  return c;
}

Matrix4 conjugate_by(const Matrix4& u, const Matrix4& rho) {
  Matrix4 tmp{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cplx s{};
      for (int k = 0; k < 4; ++k) s += u[i][k] * rho[k][j];
      tmp[i][j] = s;
    }
  Matrix4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cplx s{};
      for (int k = 0; k < 4; ++k) s += tmp[i][k] * std::conj(u[j][k]);
      out[i][j] = s;
    }
  return out;
}

// Density matrix after the gate, before the echo: (psi psi^dag) o G with
// psi = pi/2(0) x pi/2(0) |dd>.
Matrix4 after_gate(const CoherenceMatrix& gate) {
  const auto r = rotation(kPi / 2, 0.0);
  const std::array<cplx, 2> single = {r[0][0], r[1][0]};
  std::array<cplx, 4> psi{};
  for (int s = 0; s < 4; ++s) psi[s] = single[s >> 1] * single[s & 1];
  Matrix4 rho{};
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) rho[s][t] = psi[s] * std::conj(psi[t]) * gate[s][t];
  return rho;
}

double fidelity_of(const Matrix4& rho) {
  return 0.5 * (rho[0][0].real() + rho[3][3].real()) + std::abs(rho[0][3]);
}

}  // namespace

std::array<std::array<cplx, 2>, 2> rotation(double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx mi{0.0, -1.0};
  return {{{c, mi * std::polar(1.0, -phi) * s}, {mi * std::polar(1.0, phi) * s, c}}};
}

Matrix4 ramsey_output(const CoherenceMatrix& gate, double phi_half) {
  const auto single = mul(rotation(kPi / 2, phi_half), rotation(kPi, 0.0));
  return conjugate_by(kron(single, single), after_gate(gate));
}

BellFidelity bell_fidelity(const CoherenceMatrix& gate, double phi_half) {
  const Matrix4 rho = ramsey_output(gate, phi_half);
  return {fidelity_of(rho), phi_half, std::arg(rho[3][0])};
}

double bell_fidelity_fixed(const CoherenceMatrix& gate, double phi_half, double chi) {
  const Matrix4 rho = ramsey_output(gate, phi_half);
  return 0.5 * (rho[0][0].real() + rho[3][3].real()) +
         std::real(std::polar(1.0, -chi) * rho[3][0]);
}

BellFidelity optimize_bell_fidelity(const CoherenceMatrix& gate) {
  const Matrix4 rho_gate = after_gate(gate);
  auto objective = [&](double phi) {
    const auto single = mul(rotation(kPi / 2, phi), rotation(kPi, 0.0));
    return fidelity_of(conjugate_by(kron(single, single), rho_gate));
  };
  constexpr int kScan = 48;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < kScan; ++k) {
    const double v = objective(kTwoPi * k / kScan);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double step = kTwoPi / kScan;
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-10) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double phi = 0.5 * (lo + hi);
  if (objective(phi) < best_value) phi = best * step;
  phi = std::fmod(phi + kTwoPi, kTwoPi);
  return bell_fidelity(gate, phi);
}

CoherenceMatrix ideal_coherence(const std::array<double, 4>& branch_phases) {
  CoherenceMatrix g{};
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) g[s][t] = std::polar(1.0, branch_phases[s] - branch_phases[t]);
  return g;
}

}  // namespace fastgate
