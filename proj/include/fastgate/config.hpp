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
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastgate {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when a configuration value is out of range. `field()` names the
/// offending key using the dotted path of the configuration file.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Raised by the numerical solvers when a grid or step-size audit fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axial trap and standing-wave geometry of the two-ion crystal.
struct TrapSpec {
  double f_c = 1.92e6;             // centre-of-mass frequency, Hz
  double eta_c = 0.126;            // COM Lamb-Dicke parameter (per ion)
  double spacing_periods = 12.5;   // ion separation in standing-wave periods
  double nbar_c = 0.0;
  double nbar_s = 0.0;

  double f_s() const { return std::sqrt(3.0) * f_c; }
  double eta_s() const { return eta_c * std::pow(3.0, -0.25); }

  bool operator==(const TrapSpec&) const = default;
};

struct Segment {
  double duration = 0.0;   // s
  double amplitude = 0.0;  // relative to omega_peak, in [0, 1]

  bool operator==(const Segment&) const = default;
};

/// Segmented drive envelope. When `symmetric` is set, `segments` lists the
/// first half up to and including the centre segment; the remainder is the
/// mirror image. Segment boundaries sit at the centres of the linear edges,
/// so the outer edges add t_f/2 at each end of the pulse.
struct PulseShape {
  std::vector<Segment> segments;
  bool symmetric = true;
  double edge_time = 5.0e-9;   // 0%-100% linear edge width, s
  double omega_peak = 0.0;     // peak drive, rad/s
  double nu = 0.0;             // beat-note frequency, Hz
  double phi_half = 0.0;       // analysis pulse phase, rad

  /// Full segment list with the mirror half appended when symmetric.
  std::vector<Segment> expanded() const;
  /// Gate duration: sum of expanded durations plus one edge width.
  double gate_time() const;

  bool operator==(const PulseShape&) const = default;
};

/// Light-shift coefficient per qubit state; the force on an ion in state s
/// scales with lambda_s.
struct SpinCoupling {
  double lambda_down = 1.0;
  double lambda_up = -1.0;

  double operator()(int spin) const { return spin == 0 ? lambda_down : lambda_up; }
  bool operator==(const SpinCoupling&) const = default;
};

/// Two-qubit spin configuration of the crystal; bit j is the state of ion j
/// (0 = down, 1 = up).
enum class Branch : int { DownDown = 0, DownUp = 1, UpDown = 2, UpUp = 3 };

inline constexpr std::array<Branch, 4> kBranches = {Branch::DownDown, Branch::DownUp,
                                                    Branch::UpDown, Branch::UpUp};

inline int spin_of(Branch b, int ion) {
  const int v = static_cast<int>(b);
  return ion == 0 ? (v >> 1) & 1 : v & 1;
}

const char* branch_name(Branch b);

enum class Mode : int { Com = 0, Stretch = 1 };
inline constexpr std::array<Mode, 2> kModes = {Mode::Com, Mode::Stretch};

/// Normal-mode decomposition of the two-ion crystal. Ion j moves by
/// sum_m b[j][m] Q_m with b = (1, 1; 1, -1)/sqrt(2).
struct DriveGeometry {
  std::array<std::array<double, 2>, 2> b{};  // [ion][mode]
  std::array<double, 2> theta{};             // standing-wave phase per ion

  static DriveGeometry from_trap(const TrapSpec& trap);

  /// Sign of ion j's participation in mode m (+1 or -1).
  double sign(int ion, Mode m) const { return b[ion][static_cast<int>(m)] > 0 ? 1.0 : -1.0; }
};

struct InitialState {
  enum class Kind { Ground, Coherent, Thermal };
  Kind kind = Kind::Ground;
  cplx alpha_c{};
  cplx alpha_s{};
  int samples = 1;  // thermal: number of sampled coherent states (full solver)

  bool operator==(const InitialState&) const = default;
};

struct SimOptions {
  int phi0_grid_size = 16;
  double phi0_offset = 0.0;                 // rad, shifts the whole phi0 grid
  std::optional<int> grid_points;           // per motional axis; auto when empty
  std::optional<double> grid_extent;        // half-width in ground-state widths
  std::optional<double> time_step;          // s; auto when empty
  InitialState initial;
  std::uint64_t rng_seed = 1;
  int parallelism = 1;
  bool optimize_phi_half = true;
  /// Extra beat-note phase phi(t) in rad, e.g. an AOM switching chirp.
  /// Not serialized and ignored by equality.
  std::function<double(double)> phase_perturbation;

  bool operator==(const SimOptions& o) const;
};

/// Raw, unvalidated gate configuration as read from a file.
struct GateConfig {
  TrapSpec trap;
  PulseShape pulse;
  SpinCoupling coupling;
  SimOptions sim;

  bool operator==(const GateConfig&) const = default;
};

/// Piece of the envelope on which it is linear in t.
struct LinearPiece {
  double t0 = 0.0;
  double t1 = 0.0;
  double v0 = 0.0;  // normalized amplitude at t0
  double v1 = 0.0;  // normalized amplitude at t1

  double slope() const { return t1 > t0 ? (v1 - v0) / (t1 - t0) : 0.0; }
};

/// Configuration whose invariants have been checked, with derived
/// quantities materialized. Immutable; safe to share between threads.
class ValidatedConfig {
 public:
  const GateConfig& raw() const { return raw_; }
  const TrapSpec& trap() const { return raw_.trap; }
  const PulseShape& pulse() const { return raw_.pulse; }
  const SpinCoupling& coupling() const { return raw_.coupling; }
  const SimOptions& sim() const { return raw_.sim; }
  const DriveGeometry& geometry() const { return geometry_; }

  double f_s() const { return f_s_; }
  double eta_s() const { return eta_s_; }
  double gate_time() const { return gate_time_; }
  double mode_frequency(Mode m) const { return m == Mode::Com ? raw_.trap.f_c : f_s_; }
  double eta(Mode m) const { return m == Mode::Com ? raw_.trap.eta_c : eta_s_; }
  double nbar(Mode m) const { return m == Mode::Com ? raw_.trap.nbar_c : raw_.trap.nbar_s; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<LinearPiece>& pieces() const { return pieces_; }

  /// Uniform phi0 grid including the configured offset.
  std::vector<double> phi0_grid() const;

  /// Copy with a modified raw configuration, revalidated.
  ValidatedConfig with(const std::function<void(GateConfig&)>& edit) const;
  ValidatedConfig with_omega(double omega_peak) const;

  bool operator==(const ValidatedConfig& o) const { return raw_ == o.raw_; }

 private:
  friend ValidatedConfig validate(const GateConfig&);
  GateConfig raw_;
  DriveGeometry geometry_;
  double f_s_ = 0.0;
  double eta_s_ = 0.0;
  double gate_time_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<LinearPiece> pieces_;
};

/// Checks every configuration invariant; throws ConfigError naming the field.
ValidatedConfig validate(const GateConfig& config);
inline ValidatedConfig validate(const ValidatedConfig& config) { return validate(config.raw()); }

/// Piecewise-linear decomposition of the envelope over [0, t_g].
std::vector<LinearPiece> envelope_pieces(const PulseShape& pulse);

/// Normalized amplitude Omega(t)/omega_peak. Throws std::out_of_range
/// outside [0, t_g].
double envelope(const PulseShape& pulse, double t);

/// Envelope lookup over precomputed pieces; no range check.
double envelope_at(const std::vector<LinearPiece>& pieces, double t);

/// Integrated pulse area, integral of Omega(t) dt in rad.
double pulse_area(const PulseShape& pulse);

}  // namespace fastgate
