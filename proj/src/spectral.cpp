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

#include "fastgate/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace fastgate {

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n) {
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

const GaussLegendre& gauss12() {
  static const GaussLegendre rule(12);
  return rule;
}

// sum_{n>=0} z^n / (n + offset)!
cplx exp_series(cplx z, int offset) {
  cplx term = 1.0;
  for (int k = 1; k <= offset; ++k) term /= static_cast<double>(k);
  cplx sum = term;
  for (int n = 1; n < 30; ++n) {
    term *= z / static_cast<double>(n + offset);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// sum_{n>=0} z^n / (n! (n + 2))
cplx exp_series_moment1(cplx z) {
  cplx term = 1.0;
  cplx sum = 0.5;
  for (int n = 1; n < 30; ++n) {
    term *= z / static_cast<double>(n);
    const cplx add = term / static_cast<double>(n + 2);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

cplx exp_moment0(double w, double length) {
  const double x = w * length;
  if (std::abs(x) < 0.5) return length * exp_series({0.0, x}, 1);
  const cplx z{0.0, w};
  return (std::polar(1.0, x) - 1.0) / z;
}

cplx exp_moment1(double w, double length) {
  const double x = w * length;
  if (std::abs(x) < 0.5) return length * length * exp_series_moment1({0.0, x});
  const cplx z{0.0, w};
  return (length * std::polar(1.0, x) - exp_moment0(w, length)) / z;
}

SpectralIntegrator::SpectralIntegrator(std::vector<LinearPiece> pieces, double omega_peak,
                                       std::vector<Frequency> frequencies,
                                       std::size_t cross_count,
                                       std::function<double(double)> phase_perturbation)
    : pieces_(std::move(pieces)),
      omega_peak_(omega_peak),
      freqs_(std::move(frequencies)),
      cross_count_(std::min(cross_count, freqs_.size())),
      phase_(std::move(phase_perturbation)) {
  std::vector<double> rates;
  for (const auto& f : freqs_) rates.push_back(std::abs(f.w));
  std::sort(rates.rbegin(), rates.rend());
  max_rate_ = rates.empty() ? 0.0 : rates[0] + (rates.size() > 1 ? rates[1] : rates[0]);
}

IntervalIntegrals SpectralIntegrator::integrate(double t0, double t1) const {
  IntervalIntegrals out;
  out.increments.assign(freqs_.size(), cplx{});
  out.cross.assign(cross_count_ * cross_count_, cplx{});
  out.cross_count = cross_count_;
  if (!(t1 > t0)) return out;
  for (const auto& piece : pieces_) {
    const double a = std::max(piece.t0, t0);
    const double b = std::min(piece.t1, t1);
    if (b > a) integrate_piece(piece, a, b, out.increments, out.cross);
  }
  return out;
}

void SpectralIntegrator::integrate_piece(const LinearPiece& piece, double a0, double b0,
                                         std::vector<cplx>& acc, std::vector<cplx>& cross) const {
  const auto& rule = gauss12();
  const std::size_t nf = freqs_.size();
  const double slope = omega_peak_ * piece.slope();
  auto omega_at = [&](double t) { return omega_peak_ * piece.v0 + slope * (t - piece.t0); };
  auto phase_at = [&](std::size_t k, double t) {
    double arg = freqs_[k].w * t;
    if (phase_) arg += freqs_[k].chirp_sign * phase_(t);
    return arg;
  };

  // Sub-interval length: integrand phase advance <= 3 rad, and with a
  // perturbation also at most ~1 ns so the chirp is resolved.
  double h_max = max_rate_ > 0 ? 3.0 / max_rate_ : (b0 - a0);
  if (phase_) h_max = std::min(h_max, 1e-9);
  const int n_sub = std::max(1, static_cast<int>(std::ceil((b0 - a0) / h_max)));
  const double h = (b0 - a0) / n_sub;

  // Integral of Omega(s) e^{i arg_k(s)} over [a, x].
  std::vector<cplx> partial(nf);
  std::vector<cplx> base(nf);
  auto partial_integrals = [&](double a, double x) {
    if (!phase_) {
      const double ua = omega_at(a);
      for (std::size_t k = 0; k < nf; ++k) {
        const double w = freqs_[k].w;
        partial[k] = base[k] * (ua * exp_moment0(w, x - a) + slope * exp_moment1(w, x - a));
      }
      return;
    }
    const double half = 0.5 * (x - a);
    const double mid = 0.5 * (x + a);
    std::fill(partial.begin(), partial.end(), cplx{});
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = mid + half * rule.nodes[g];
      const double wgt = half * rule.weights[g] * omega_at(s);
      for (std::size_t k = 0; k < nf; ++k) partial[k] += wgt * std::polar(1.0, phase_at(k, s));
    }
  };

  for (int sub = 0; sub < n_sub; ++sub) {
    const double a = a0 + sub * h;
    const double b = (sub + 1 == n_sub) ? b0 : a + h;
    for (std::size_t k = 0; k < nf; ++k) base[k] = std::polar(1.0, freqs_[k].w * a);
    if (cross_count_ > 0) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (b + a);
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double x = mid + half * rule.nodes[g];
        partial_integrals(a, x);
        const double wgt = half * rule.weights[g] * omega_at(x);
        for (std::size_t l = 0; l < cross_count_; ++l) {
          const cplx dk = wgt * std::polar(1.0, phase_at(l, x));
          for (std::size_t k = 0; k < cross_count_; ++k) {
            cross[k * cross_count_ + l] += std::conj(acc[k] + partial[k]) * dk;
          }
        }
      }
    }
    partial_integrals(a, b);
    for (std::size_t k = 0; k < nf; ++k) acc[k] += partial[k];
  }
}

}  // namespace fastgate
