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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastgate/config.hpp"

namespace fastgate {

/// Raised when a measured trace does not fit the segmented envelope model.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double rms) : std::runtime_error(what), rms_(rms) {}
  double rms_residual() const { return rms_; }

 private:
  double rms_;
};

struct WaveformOptions {
  double sample_rate = 1.25e9;          // samples / s
  double edge_time = 5.0e-9;            // s, replaces the pulse's edge time
  std::optional<int> quantization_bits;
};

/// Amplitude samples; sample k is the envelope at t = (k + 1/2) / rate.
struct SampleStream {
  double sample_rate = 0.0;
  std::vector<double> samples;
  std::string pulse_hash;

  double time_of(std::size_t k) const { return (static_cast<double>(k) + 0.5) / sample_rate; }
};

/// ceil(t_g * rate) samples of the envelope with the requested edge time.
/// Throws ConfigError when the edge spans fewer than two sample periods.
SampleStream compile(const PulseShape& pulse, const WaveformOptions& options = {});

/// Monotone drive -> optical amplitude map tabulated on [0, 1].
class TransferCurve {
 public:
  /// Throws ConfigError unless `drive` and `optical` are strictly increasing.
  TransferCurve(std::vector<double> drive, std::vector<double> optical);
  ~TransferCurve();
  TransferCurve(const TransferCurve&);
  TransferCurve& operator=(const TransferCurve&) = delete;

  static TransferCurve identity(int points = 2);

  double apply(double drive) const;
  /// Drive that produces `optical`; throws std::domain_error with
  /// "unreachable amplitude" beyond the curve's range.
  double invert(double optical) const;
  double max_output() const { return optical_.back(); }

 private:
  struct Impl;
  std::vector<double> drive_, optical_;
  Impl* impl_;
};

/// Drive stream whose optical output reproduces the requested amplitudes.
SampleStream compensate(const SampleStream& stream, const TransferCurve& curve);
/// Optical stream produced by a drive stream.
SampleStream apply_curve(const SampleStream& stream, const TransferCurve& curve);

struct Trace {
  std::vector<double> t;
  std::vector<double> amplitude;
};

Trace to_trace(const SampleStream& stream);
/// Two whitespace-separated columns (t, amplitude); '#' starts a comment.
Trace read_trace(std::istream& in);

struct FitRequest {
  int segments = 0;                      // expanded segment count
  std::optional<PulseShape> nominal;     // starting point; otherwise from the trace
  double mismatch_threshold = 0.025;     // max rms residual relative to the peak
};

struct EnvelopeFit {
  std::vector<double> boundaries;        // n + 1 edge centres, s
  std::vector<double> amplitudes;        // n plateau levels
  double edge_time = 0.0;
  std::vector<double> boundary_errors;   // standard errors
  std::vector<double> amplitude_errors;
  double edge_time_error = 0.0;
  double rms_residual = 0.0;

  /// Durations and amplitudes as an (asymmetric) pulse, amplitudes normalized.
  PulseShape to_pulse(double omega_peak, double nu) const;
};

/// Least-squares fit of the segmented envelope (boundaries, levels, edge
/// width) to a trace. Throws FitError("model mismatch ...") on a poor fit.
EnvelopeFit fit_envelope(const Trace& trace, const FitRequest& request);

/// Text: "# fastgate-waveform 1", "# sample_rate R", "# length N",
/// "# pulse_hash H", then one %.17g sample per line.
void write_text(std::ostream& out, const SampleStream& stream);
SampleStream read_text(std::istream& in);
/// Binary, little-endian: "FGWF", u32 version, f64 rate, u64 length,
/// 16 hash bytes, then length f64 samples.
void write_binary(std::ostream& out, const SampleStream& stream);
SampleStream read_binary(std::istream& in);

}  // namespace fastgate
