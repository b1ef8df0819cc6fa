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

#include <array>

#include "fastgate/config.hpp"

namespace fastgate {

/// 4x4 complex matrix over the spin basis dd, du, ud, uu.
using Matrix4 = std::array<std::array<cplx, 4>, 4>;

/// Motional overlap matrix G[s][s'] = <chi_s'|chi_s> of the branch states at
/// the end of the gate, phases included. The spin density matrix after the
/// gate is the elementwise product of the input density matrix with G.
using CoherenceMatrix = Matrix4;

struct BellFidelity {
  double fidelity = 0.0;
  double phi_half = 0.0;    // phase of the closing pi/2 pulse
  double bell_phase = 0.0;  // phase chi of the target (|dd> + e^{i chi}|uu>)/sqrt(2)
  double error() const { return 1.0 - fidelity; }
};

/// Single-qubit rotation by `theta` about cos(phi) x + sin(phi) y.
std::array<std::array<cplx, 2>, 2> rotation(double theta, double phi);

/// Two-qubit density matrix at the end of the sequence
///   pi/2(0) -> gate -> pi(0) echo -> pi/2(phi_half)
/// starting from |dd>, with instantaneous ideal rotations on both ions.
Matrix4 ramsey_output(const CoherenceMatrix& gate, double phi_half);

/// Fidelity with (|dd> + e^{i chi}|uu>)/sqrt(2), maximized over chi:
/// (rho_00 + rho_33)/2 + |rho_03|.
BellFidelity bell_fidelity(const CoherenceMatrix& gate, double phi_half);

/// Fidelity with (|dd> + e^{i chi}|uu>)/sqrt(2) for a fixed target phase.
double bell_fidelity_fixed(const CoherenceMatrix& gate, double phi_half, double chi);

/// bell_fidelity maximized over phi_half: coarse scan then golden section.
BellFidelity optimize_bell_fidelity(const CoherenceMatrix& gate);

/// Coherence matrix of ideal branch phases with no residual motion.
CoherenceMatrix ideal_coherence(const std::array<double, 4>& branch_phases);

}  // namespace fastgate
