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


#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fastgate/presets.hpp"
#include "fastgate/waveform.hpp"
#include "support.hpp"

using namespace fastgate;
using fastgate::testing::contains;

namespace {

PulseShape flat_pulse(double gate_time) {
  PulseShape p;
  p.symmetric = false;
  p.segments = {{gate_time - p.edge_time, 1.0}};
  p.omega_peak = kTwoPi * 1e6;
  p.nu = 2e6;
  return p;
}

// Edge centres of the expanded pulse.
std::vector<double> boundaries_of(const PulseShape& p) {
  std::vector<double> b{p.edge_time / 2};
  for (const Segment& s : p.expanded()) b.push_back(b.back() + s.duration);
  return b;
}

TransferCurve tabulated(double (*f)(double), int points) {
  std::vector<double> x(points), y(points);
  for (int i = 0; i < points; ++i) {
    x[i] = static_cast<double>(i) / (points - 1);
    y[i] = f(x[i]);
  }
  return TransferCurve(x, y);
}

}  // namespace

TEST_SUITE("waveform") {

TEST_CASE("sample count rounds the gate time up to whole samples") {
  CHECK(compile(flat_pulse(1.59e-6)).samples.size() == 1988);
  const SampleStream s = compile(high_fidelity_gate().pulse);
  CHECK(s.samples.size() ==
        static_cast<std::size_t>(std::ceil(high_fidelity_gate().pulse.gate_time() * 1.25e9 - 1e-9)));
  for (double v : s.samples) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("a dark pulse compiles to zeros") {
  PulseShape p = high_fidelity_gate().pulse;
  for (Segment& s : p.segments) s.amplitude = 0.0;
  for (double v : compile(p).samples) CHECK(v == 0.0);
}

TEST_CASE("sub-sample boundary shifts reach the stream") {
  PulseShape p = high_fidelity_gate().pulse;
  const SampleStream a = compile(p);
  p.segments[0].duration += 0.2e-9;
  p.segments[1].duration -= 0.2e-9;
  const SampleStream b = compile(p);
  REQUIRE(a.samples.size() == b.samples.size());
  double diff = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    diff = std::max(diff, std::abs(a.samples[k] - b.samples[k]));
  CHECK(diff > 1e-3);
}

TEST_CASE("edges must span two sample periods") {
  WaveformOptions opts;
  opts.edge_time = 1e-9;
  CHECK_THROWS_AS(compile(high_fidelity_gate().pulse, opts), ConfigError);
  opts.edge_time = 1.6e-9;
  CHECK_NOTHROW(compile(high_fidelity_gate().pulse, opts));
}

TEST_CASE("samples integrate to the envelope area") {
  for (const PulseShape& p : {high_fidelity_gate().pulse, fastest_gate().pulse}) {
    const SampleStream s = compile(p);
    double sum = 0.0;
    for (double v : s.samples) sum += v;
    const double area = pulse_area(p) / p.omega_peak;
    CHECK(sum / s.sample_rate == doctest::Approx(area).epsilon(1e-3));
  }
}

TEST_CASE("quantized samples sit on the converter grid") {
  WaveformOptions opts;
  opts.quantization_bits = 8;
  for (double v : compile(high_fidelity_gate().pulse, opts).samples) {
    const double code = v * 255.0;
    CHECK(std::abs(code - std::round(code)) < 1e-9);
  }
}

TEST_CASE("identity transfer leaves the stream alone") {
  const SampleStream s = compile(high_fidelity_gate().pulse);
  const SampleStream c = compensate(s, TransferCurve::identity());
  for (std::size_t k = 0; k < s.samples.size(); ++k)
    CHECK(c.samples[k] == doctest::Approx(s.samples[k]).epsilon(1e-12));
}

TEST_CASE("square-law transfer is undone by a square root") {
  const TransferCurve curve = tabulated([](double x) { return x * x; }, 201);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double want = i / 100.0;
    worst = std::max(worst, std::abs(curve.invert(want) - std::sqrt(want)));
  }
  MESSAGE("max deviation from sqrt ", worst);
  CHECK(worst < 2e-3);
  CHECK(curve.invert(0.25) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("compensation round trip") {
  const TransferCurve curve = tabulated([](double x) { return std::sin(kPi / 2 * x); }, 21);
  const SampleStream s = compile(fastest_gate().pulse);
  const SampleStream back = apply_curve(compensate(s, curve), curve);
  for (std::size_t k = 0; k < s.samples.size(); ++k)
    CHECK(std::abs(back.samples[k] - s.samples[k]) <= 2e-3 * std::max(s.samples[k], 1e-3));
}

TEST_CASE("saturating transfer cannot reach full amplitude") {
  const TransferCurve curve = tabulated([](double x) { return 0.9 * x; }, 5);
  try {
    compensate(compile(high_fidelity_gate().pulse), curve);
    FAIL("expected an exception");
  } catch (const std::domain_error& e) {
    CHECK(contains(e.what(), "unreachable amplitude"));
  }
}

TEST_CASE("transfer curves must increase") {
  CHECK_THROWS_AS(TransferCurve({0.0, 0.5, 1.0}, {0.0, 0.6, 0.5}), ConfigError);
  CHECK_THROWS_AS(TransferCurve({0.0}, {0.0}), ConfigError);
}

TEST_CASE("noiseless trace gives back the programmed segments") {
  for (const PulseShape& p : {high_fidelity_gate().pulse, fastest_gate().pulse}) {
    const auto expanded = p.expanded();
    FitRequest req;
    req.segments = static_cast<int>(expanded.size());
    const EnvelopeFit fit = fit_envelope(to_trace(compile(p)), req);
    const auto truth = boundaries_of(p);
    REQUIRE(fit.amplitudes.size() == expanded.size());
    for (std::size_t i = 0; i < expanded.size(); ++i)
      CHECK(std::abs(fit.amplitudes[i] - expanded[i].amplitude) < 1e-6);
    for (std::size_t i = 0; i < truth.size(); ++i)
      CHECK(std::abs(fit.boundaries[i] - truth[i]) < 0.01e-9);
    CHECK(std::abs(fit.edge_time - p.edge_time) < 0.01e-9);
  }
}

TEST_CASE("one percent noise resolves boundaries to a fraction of a nanosecond") {
  const PulseShape p = high_fidelity_gate().pulse;
  Trace trace = to_trace(compile(p));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (double& a : trace.amplitude) a += noise(rng);
  FitRequest req;
  req.segments = 5;
  const EnvelopeFit fit = fit_envelope(trace, req);
  const auto truth = boundaries_of(p);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(fit.boundary_errors[i] > 0.0);
    CHECK(fit.boundary_errors[i] <= 0.2e-9);
    CHECK(std::abs(fit.boundaries[i] - truth[i]) < 5 * fit.boundary_errors[i]);
  }
  for (double e : fit.amplitude_errors) CHECK(e < 0.01);
}

TEST_CASE("wrong segment count is a model mismatch") {
  FitRequest req;
  req.segments = 3;
  try {
    fit_envelope(to_trace(compile(high_fidelity_gate().pulse)), req);
    FAIL("expected an exception");
  } catch (const FitError& e) {
    CHECK(contains(e.what(), "model mismatch"));
    CHECK(e.rms_residual() > 0.025);
  }
}

TEST_CASE("text and binary streams round trip exactly") {
  SampleStream s = compile(fastest_gate().pulse);
  s.pulse_hash = "0123456789abcdef";
  std::stringstream text;
  write_text(text, s);
  CHECK(text.str().rfind("# fastgate-waveform 1\n", 0) == 0);
  const SampleStream t = read_text(text);
  CHECK(t.samples == s.samples);
  CHECK(t.sample_rate == s.sample_rate);
  CHECK(t.pulse_hash == s.pulse_hash);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_binary(bin, s);
  const std::string bytes = bin.str();
  REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 16 + 8 * s.samples.size());
  CHECK(bytes.substr(0, 4) == "FGWF");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  const SampleStream b = read_binary(bin);
  CHECK(b.samples == s.samples);
  CHECK(b.pulse_hash == s.pulse_hash);
}

TEST_CASE("a truncated text stream is rejected") {
  std::stringstream text;
  text << "# fastgate-waveform 1\n# sample_rate 1.25e9\n# length 3\n# pulse_hash 0\n0.5\n";
  CHECK_THROWS(read_text(text));
}

}  // TEST_SUITE
