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

#include "fastgate/waveform.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>
#include <gsl/gsl_multifit_nlinear.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "fastgate/io.hpp"

namespace fastgate {

SampleStream compile(const PulseShape& pulse, const WaveformOptions& options) {
  if (!(options.sample_rate > 0)) throw ConfigError("sample_rate", "must be positive");
  if (options.edge_time < 2.0 / options.sample_rate)
    throw ConfigError("edge_time", "shorter than two sample periods");
  if (options.quantization_bits && (*options.quantization_bits < 1 || *options.quantization_bits > 52))
    throw ConfigError("quantization_bits", "must lie in [1, 52]");
  PulseShape p = pulse;
  p.edge_time = options.edge_time;
  if (p.segments.empty()) throw ConfigError("pulse.segments", "no segments");
  for (const auto& s : p.segments) {
    if (!(s.duration >= p.edge_time))
      throw ConfigError("edge_time", "exceeds the shortest segment duration");
    if (!(s.amplitude >= 0 && s.amplitude <= 1))
      throw ConfigError("pulse.segments.amplitude", "must lie in [0, 1]");
  }

  SampleStream out;
  out.sample_rate = options.sample_rate;
  out.pulse_hash = pulse_hash(pulse);
  const auto pieces = envelope_pieces(p);
  const double tg = p.gate_time();
  const auto n = static_cast<std::size_t>(std::ceil(tg * options.sample_rate - 1e-9));
  out.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = out.time_of(k);
    out.samples[k] = t < tg ? envelope_at(pieces, t) : 0.0;
  }
  if (options.quantization_bits) {
    const double levels = std::ldexp(1.0, *options.quantization_bits) - 1.0;
    for (auto& s : out.samples) s = std::round(s * levels) / levels;
  }
  return out;
}

struct TransferCurve::Impl {
  gsl_interp* interp = nullptr;
  gsl_interp_accel* accel = nullptr;
};

TransferCurve::TransferCurve(std::vector<double> drive, std::vector<double> optical)
    : drive_(std::move(drive)), optical_(std::move(optical)), impl_(new Impl) {
  if (drive_.size() != optical_.size() || drive_.size() < 2) {
    delete impl_;
    throw ConfigError("transfer_curve", "needs at least two (drive, optical) points");
  }
  for (std::size_t i = 1; i < drive_.size(); ++i) {
    if (!(drive_[i] > drive_[i - 1]) || !(optical_[i] > optical_[i - 1])) {
      delete impl_;
      throw ConfigError("transfer_curve", "not monotone");
    }
  }
  const gsl_interp_type* type = drive_.size() >= 3 ? gsl_interp_steffen : gsl_interp_linear;
  impl_->interp = gsl_interp_alloc(type, drive_.size());
  impl_->accel = gsl_interp_accel_alloc();
  gsl_interp_init(impl_->interp, drive_.data(), optical_.data(), drive_.size());
}

TransferCurve::TransferCurve(const TransferCurve& o) : TransferCurve(o.drive_, o.optical_) {}

TransferCurve::~TransferCurve() {
  if (impl_) {
    gsl_interp_free(impl_->interp);
    gsl_interp_accel_free(impl_->accel);
    delete impl_;
  }
}

TransferCurve TransferCurve::identity(int points) {
  std::vector<double> x(std::max(points, 2));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i) / (x.size() - 1);
  return TransferCurve(x, x);
}

double TransferCurve::apply(double drive) const {
  const double x = std::clamp(drive, drive_.front(), drive_.back());
  return gsl_interp_eval(impl_->interp, drive_.data(), optical_.data(), x, impl_->accel);
}

double TransferCurve::invert(double optical) const {
  if (optical < optical_.front() - 1e-15 || optical > optical_.back() + 1e-15)
    throw std::domain_error("unreachable amplitude");
  double lo = drive_.front(), hi = drive_.back();
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (apply(mid) < optical ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SampleStream compensate(const SampleStream& stream, const TransferCurve& curve) {
  SampleStream out = stream;
  for (auto& s : out.samples) s = curve.invert(s);
  return out;
}

SampleStream apply_curve(const SampleStream& stream, const TransferCurve& curve) {
  SampleStream out = stream;
  for (auto& s : out.samples) s = curve.apply(s);
  return out;
}

Trace to_trace(const SampleStream& stream) {
  Trace tr;
  for (std::size_t k = 0; k < stream.samples.size(); ++k) {
    tr.t.push_back(stream.time_of(k));
    tr.amplitude.push_back(stream.samples[k]);
  }
  return tr;
}

Trace read_trace(std::istream& in) {
  Trace tr;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    double t, a;
    if (row >> t >> a) {
      tr.t.push_back(t);
      tr.amplitude.push_back(a);
    }
  }
  return tr;
}

PulseShape EnvelopeFit::to_pulse(double omega_peak, double nu) const {
  PulseShape p;
  p.symmetric = false;
  p.edge_time = edge_time;
  p.omega_peak = omega_peak;
  p.nu = nu;
  const double peak = *std::max_element(amplitudes.begin(), amplitudes.end());
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    p.segments.push_back({boundaries[i + 1] - boundaries[i], peak > 0 ? amplitudes[i] / peak : 0.0});
  return p;
}

namespace {

// Parameters, times in ns: b_0..b_n, a_1..a_n, t_f.
struct FitData {
  const Trace* trace;
  int n;
};

double model_at(const double* p, int n, double t_ns) {
  const double tf = std::max(std::abs(p[2 * n + 1]), 1e-6);
  double v = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double next = i < n ? p[n + 1 + i] : 0.0;
    const double x = std::clamp((t_ns - p[i]) / tf + 0.5, 0.0, 1.0);
    v += (next - prev) * x;
    prev = next;
  }
  return v;
}

int residuals(const gsl_vector* x, void* data, gsl_vector* f) {
  const auto* d = static_cast<FitData*>(data);
  const double* p = gsl_vector_const_ptr(x, 0);
  for (std::size_t i = 0; i < d->trace->t.size(); ++i)
    gsl_vector_set(f, i, model_at(p, d->n, d->trace->t[i] * 1e9) - d->trace->amplitude[i]);
  return GSL_SUCCESS;
}

std::vector<double> initial_guess(const Trace& trace, const FitRequest& req, double peak) {
  const int n = req.segments;
  std::vector<double> p(2 * n + 2);
  if (req.nominal) {
    const auto segs = req.nominal->expanded();
    double b = 0.5 * req.nominal->edge_time;
    p[0] = b * 1e9;
    for (int i = 0; i < n; ++i) {
      b += segs[i].duration;
      p[i + 1] = b * 1e9;
      p[n + 1 + i] = segs[i].amplitude * peak;
    }
    p[2 * n + 1] = req.nominal->edge_time * 1e9;
    return p;
  }
  // Edges sit at the n + 1 strongest slope peaks, picked greedily with
  // a suppression window so one ramp is not counted twice.
  const std::size_t m = trace.t.size();
  std::vector<double> slope(m, 0.0);
  for (std::size_t k = 1; k + 1 < m; ++k)
    slope[k] = std::abs(trace.amplitude[k + 1] - trace.amplitude[k - 1]);
  std::vector<double> smooth(m, 0.0);
  for (std::size_t k = 2; k + 2 < m; ++k)
    for (std::size_t j = k - 2; j <= k + 2; ++j) smooth[k] += slope[j];
  const std::size_t guard = std::max<std::size_t>(4, m / (8 * static_cast<std::size_t>(n + 1)));
  std::vector<std::size_t> picks;
  std::vector<bool> blocked(m, false);
  while (static_cast<int>(picks.size()) < n + 1) {
    std::size_t best = m;
    for (std::size_t k = 0; k < m; ++k)
      if (!blocked[k] && (best == m || smooth[k] > smooth[best])) best = k;
    if (best == m) break;
    picks.push_back(best);
    for (std::size_t j = best > guard ? best - guard : 0; j < std::min(m, best + guard + 1); ++j)
      blocked[j] = true;
  }
  std::sort(picks.begin(), picks.end());
  if (static_cast<int>(picks.size()) < n + 1)
    throw FitError("model mismatch: trace has fewer edges than segments", 0.0);
  for (int i = 0; i <= n; ++i) p[i] = trace.t[picks[i]] * 1e9;
  for (int i = 0; i < n; ++i) {
    std::vector<double> inside;
    for (std::size_t k = 0; k < m; ++k) {
      const double t = trace.t[k] * 1e9;
      if (t > p[i] && t < p[i + 1]) inside.push_back(trace.amplitude[k]);
    }
    if (inside.empty()) {
      p[n + 1 + i] = 0.5 * peak;
    } else {
      std::nth_element(inside.begin(), inside.begin() + inside.size() / 2, inside.end());
      p[n + 1 + i] = inside[inside.size() / 2];
    }
  }
  const double dt = trace.t.size() > 1 ? (trace.t[1] - trace.t[0]) * 1e9 : 1.0;
  p[2 * n + 1] = 3.0 * dt;
  return p;
}

}  // namespace

EnvelopeFit fit_envelope(const Trace& trace, const FitRequest& req) {
  const int n = req.segments;
  if (n < 1) throw ConfigError("segments", "must be positive");
  if (req.nominal && static_cast<int>(req.nominal->expanded().size()) != n)
    throw ConfigError("segments", "does not match the nominal pulse");
  const std::size_t m = trace.t.size();
  const std::size_t np = 2 * static_cast<std::size_t>(n) + 2;
  if (m <= np) throw ConfigError("trace", "too few samples for the model");
  const double peak = *std::max_element(trace.amplitude.begin(), trace.amplitude.end());
  if (!(peak > 0)) throw FitError("model mismatch: trace has no signal", 0.0);

  std::vector<double> p0 = initial_guess(trace, req, peak);
  FitData data{&trace, n};
  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = residuals;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = m;
  fdf.p = np;
  fdf.params = &data;

  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, m, np);
  gsl_vector_view x0 = gsl_vector_view_array(p0.data(), np);
  gsl_multifit_nlinear_init(&x0.vector, &fdf, w);
  int info = 0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_multifit_nlinear_driver(500, 1e-14, 1e-14, 0.0, nullptr, nullptr, &info, w);

  const gsl_vector* x = gsl_multifit_nlinear_position(w);
  const gsl_vector* f = gsl_multifit_nlinear_residual(w);
  double rss = 0.0;
  gsl_blas_ddot(f, f, &rss);
  gsl_matrix* covar = gsl_matrix_alloc(np, np);
  gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(w), 0.0, covar);
  gsl_set_error_handler(old);

  const double dof = static_cast<double>(m - np);
  const double scale = rss / dof;
  EnvelopeFit fit;
  fit.rms_residual = std::sqrt(rss / static_cast<double>(m));
  auto sigma = [&](std::size_t k) { return std::sqrt(std::max(0.0, gsl_matrix_get(covar, k, k) * scale)); };
  for (int i = 0; i <= n; ++i) {
    fit.boundaries.push_back(gsl_vector_get(x, i) * 1e-9);
    fit.boundary_errors.push_back(sigma(i) * 1e-9);
  }
  for (int i = 0; i < n; ++i) {
    fit.amplitudes.push_back(gsl_vector_get(x, n + 1 + i));
    fit.amplitude_errors.push_back(sigma(n + 1 + i));
  }
  fit.edge_time = std::abs(gsl_vector_get(x, 2 * n + 1)) * 1e-9;
  fit.edge_time_error = sigma(2 * n + 1) * 1e-9;
  gsl_matrix_free(covar);
  gsl_multifit_nlinear_free(w);

  if (fit.rms_residual > req.mismatch_threshold * peak) {
    std::ostringstream msg;
    msg << "model mismatch: rms residual " << fit.rms_residual << " exceeds "
        << req.mismatch_threshold << " of the peak " << peak << " for " << n << " segments";
    throw FitError(msg.str(), fit.rms_residual);
  }
  return fit;
}

namespace {

constexpr const char* kTextMagic = "# fastgate-waveform 1";

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated waveform");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::string fixed_hash(const std::string& h) {
  std::string out = h.substr(0, 16);
  out.resize(16, '0');
  return out;
}

}  // namespace

void write_text(std::ostream& out, const SampleStream& s) {
  char line[64];
  out << kTextMagic << '\n';
  std::snprintf(line, sizeof line, "# sample_rate %.17g\n", s.sample_rate);
  out << line;
  out << "# length " << s.samples.size() << '\n';
  out << "# pulse_hash " << fixed_hash(s.pulse_hash) << '\n';
  for (double v : s.samples) {
    std::snprintf(line, sizeof line, "%.17g\n", v);
    out << line;
  }
}

SampleStream read_text(std::istream& in) {
  SampleStream s;
  std::string line;
  if (!std::getline(in, line) || line != kTextMagic) throw std::runtime_error("not a fastgate text waveform");
  std::size_t length = 0;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      std::istringstream h(line.substr(2));
      std::string key;
      h >> key;
      if (key == "sample_rate") h >> s.sample_rate;
      else if (key == "length") h >> length;
      else if (key == "pulse_hash") h >> s.pulse_hash;
      continue;
    }
    if (!line.empty()) s.samples.push_back(std::stod(line));
  }
  if (s.samples.size() != length) throw std::runtime_error("waveform length does not match header");
  return s;
}

void write_binary(std::ostream& out, const SampleStream& s) {
  out.write("FGWF", 4);
  const std::uint32_t version = 1;
  unsigned char v[4];
  for (int i = 0; i < 4; ++i) v[i] = static_cast<unsigned char>(version >> (8 * i));
  out.write(reinterpret_cast<const char*>(v), 4);
  put_f64(out, s.sample_rate);
  put_u64(out, s.samples.size());
  out.write(fixed_hash(s.pulse_hash).data(), 16);
  for (double x : s.samples) put_f64(out, x);
}

SampleStream read_binary(std::istream& in) {
  char magic[4];
  unsigned char v[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FGWF", 4) != 0 ||
      !in.read(reinterpret_cast<char*>(v), 4))
    throw std::runtime_error("not a fastgate binary waveform");
  const std::uint32_t version = v[0] | (v[1] << 8) | (v[2] << 16) | (static_cast<std::uint32_t>(v[3]) << 24);
  if (version != 1) throw std::runtime_error("unsupported waveform version");
  SampleStream s;
  s.sample_rate = get_f64(in);
  const std::uint64_t n = get_u64(in);
  char hash[16];
  if (!in.read(hash, 16)) throw std::runtime_error("truncated waveform");
  s.pulse_hash.assign(hash, 16);
  s.samples.resize(n);
  for (auto& x : s.samples) x = get_f64(in);
  return s;
}

}  // namespace fastgate
