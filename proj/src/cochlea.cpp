// Copyright 2026 The spikevib Authors
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

#include "spikevib/cochlea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spikevib/error.hpp"

namespace spikevib::cochlea {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxRelativeCenter = 0.45;

using Complex = std::complex<long double>;

// Horner evaluation of c[0] + c[1] w + ... (ascending powers).
Complex eval_poly(const std::vector<long double>& c, Complex w) {
  Complex v = 0.0L;
  for (std::size_t i = c.size(); i-- > 0;) v = v * w + c[i];
  return v;
}

Complex eval_derivative(const std::vector<long double>& c, Complex w) {
  Complex v = 0.0L;
  for (std::size_t i = c.size(); i-- > 1;) v = v * w + static_cast<long double>(i) * c[i];
  return v;
}

// Aberth-Ehrlich iteration for all roots of a real polynomial (ascending
// coefficients, nonzero leading term).
std::vector<Complex> poly_roots(const std::vector<long double>& c) {
  const std::size_t n = c.size() - 1;
  std::vector<Complex> z(n);
  // Start on a circle bounded by the Cauchy radius, slightly rotated to avoid
  // symmetric stalls.
  long double radius = 0.0L;
  for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i] / c[n]));
  radius = std::min(radius + 1.0L, 2.0L);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = std::polar(radius, static_cast<long double>(2.0 * std::numbers::pi * (k + 0.25) / n));
  }
  for (int iter = 0; iter < 500; ++iter) {
    long double largest_step = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex f = eval_poly(c, z[k]);
      if (f == Complex(0.0L)) continue;
      const Complex ratio = f / eval_derivative(c, z[k]);
      Complex repulsion = 0.0L;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) repulsion += 1.0L / (z[k] - z[j]);
      }
      const Complex step = ratio / (1.0L - ratio * repulsion);
      z[k] -= step;
      largest_step = std::max(largest_step, std::abs(step) / std::max(1.0L, std::abs(z[k])));
    }
    if (largest_step < 1e-19L) break;
  }
  return z;
}

// Quadratic factors (ascending: c0 + c1 w + c2 w^2) with real coefficients
// built from the roots of a real polynomial.
std::vector<std::array<long double, 3>> real_factors(std::vector<Complex> roots) {
  std::vector<std::array<long double, 3>> out;
  std::vector<long double> reals;
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    return a.imag() > b.imag();
  });
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const long double scale = std::max(1.0L, std::abs(roots[i]));
    if (std::abs(roots[i].imag()) <= 1e-12L * scale) {
      reals.push_back(roots[i].real());
      used[i] = true;
      continue;
    }
    // Pair with the nearest conjugate.
    std::size_t best = i;
    long double best_d = std::numeric_limits<long double>::infinity();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j] || j == i) continue;
      const long double d = std::abs(roots[j] - std::conj(roots[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[i] = used[best] = true;
    const Complex r = 0.5L * (roots[i] + std::conj(roots[best]));
    out.push_back({std::norm(r), -2.0L * r.real(), 1.0L});
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    out.push_back({reals[i] * reals[i + 1], -(reals[i] + reals[i + 1]), 1.0L});
  }
  if (reals.size() % 2 == 1) out.push_back({-reals.back(), 1.0L, 0.0L});
  return out;
}

}  // namespace

double impulse_response_reference(const GammatoneSpec& spec, double t) {
  if (t < 0.0) return 0.0;
  return spec.a * std::pow(t, spec.n - 1) * std::exp(-kTwoPi * spec.b * t) *
         std::cos(kTwoPi * spec.f_c * t + spec.phi);
}

double erb_hz(double f_hz) { return 24.7 * (4.37 * f_hz / 1000.0 + 1.0); }

double default_bandwidth_hz(double f_c) { return 1.019 * erb_hz(f_c); }

FilterbankConfig FilterbankConfig::resolved(double sample_rate) const {
  FilterbankConfig out = *this;
  if (out.f_max_hz <= 0.0) out.f_max_hz = 0.4 * sample_rate;
  if (!(out.f_max_hz < sample_rate / 2.0)) {
    throw InputError("filterbank: f_max " + std::to_string(out.f_max_hz) +
                     " Hz must be below Nyquist " + std::to_string(sample_rate / 2.0) + " Hz");
  }
  return out;
}

std::vector<double> center_frequencies(const FilterbankConfig& cfg) {
  if (cfg.n_channels < 1) throw InputError("filterbank: n_channels must be >= 1");
  if (!(cfg.f_min_hz > 0.0) || !(cfg.f_min_hz < cfg.f_max_hz)) {
    throw InputError("filterbank: need 0 < f_min < f_max");
  }
  if (cfg.n_channels == 1) return {cfg.f_min_hz};
  std::vector<double> fc(cfg.n_channels);
  const double log_min = std::log(cfg.f_min_hz);
  const double step = (std::log(cfg.f_max_hz) - log_min) / static_cast<double>(cfg.n_channels - 1);
  for (std::size_t i = 0; i < cfg.n_channels; ++i) {
    fc[i] = std::exp(log_min + step * static_cast<double>(i));
  }
  fc.front() = cfg.f_min_hz;
  fc.back() = cfg.f_max_hz;
  return fc;
}

std::complex<double> BiquadSection::response(double f_hz, double sample_rate) const {
  const std::complex<double> q = std::polar(1.0, -kTwoPi * f_hz / sample_rate);
  return (b0 + q * (b1 + q * b2)) / (1.0 + q * (a1 + q * a2));
}

std::array<std::complex<double>, 2> BiquadSection::poles() const {
  // z^2 + a1 z + a2 = 0
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

std::complex<double> FilterCascade::response(double f_hz) const {
  std::complex<double> h = 1.0;
  for (const auto& s : sections) h *= s.response(f_hz, sample_rate);
  return h;
}

FilterCascade design_channel(double f_c, double sample_rate, double bandwidth_hz) {
  if (!(sample_rate > 0.0)) throw DesignError("design: sample rate must be positive");
  if (!(f_c > 0.0) || f_c > kMaxRelativeCenter * sample_rate) {
    throw DesignError("design: center frequency " + std::to_string(f_c) +
                      " Hz outside (0, 0.45 * fs] for fs = " + std::to_string(sample_rate));
  }
  const double b = bandwidth_hz > 0.0 ? bandwidth_hz : default_bandwidth_hz(f_c);
  if (!std::isfinite(b)) throw DesignError("design: bandwidth must be finite");

  // Impulse-invariant transform of g(t) = t^3 e^{-beta t} cos(omega t): with
  // p = e^{(-beta + j omega) T} and w = z^-1,
  //   sum_n n^3 p^n w^n = x (1 + 4x + x^2) / (1 - x)^4,  x = p w,
  // so G(w) = Re[x (1 + 4x + x^2) (1 - conj(p) w)^4] / |1 - p w|^8. The four
  // sections share the pole pair of p; the degree-7 numerator is w times a
  // degree-6 polynomial, factored into real quadratics.
  const long double T = 1.0L / sample_rate;
  const Complex p = std::exp(Complex(-kTwoPi * b * T, kTwoPi * f_c * T));
  const std::array<Complex, 4> a = {0.0L, p, 4.0L * p * p, p * p * p};
  std::array<Complex, 5> d{};
  constexpr std::array<long double, 5> binom = {1, 4, 6, 4, 1};
  for (std::size_t k = 0; k < 5; ++k) d[k] = binom[k] * std::pow(-std::conj(p), static_cast<int>(k));
  std::vector<long double> num(8, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < d.size(); ++k) num[i + k] += (a[i] * d[k]).real();
  }
  // Drop the common factor w and any negligible leading terms.
  std::vector<long double> poly(num.begin() + 1, num.end());
  long double biggest = 0.0L;
  for (long double v : poly) biggest = std::max(biggest, std::abs(v));
  while (poly.size() > 1 && std::abs(poly.back()) <= 1e-15L * biggest) poly.pop_back();
  std::size_t delays = 1;
  while (poly.size() > 1 && std::abs(poly.front()) <= 1e-15L * biggest) {
    poly.erase(poly.begin());
    ++delays;
  }
  auto factors = poly.size() > 1 ? real_factors(poly_roots(poly)) : std::vector<std::array<long double, 3>>{};
  // Remaining delays go into sections with spare degree.
  for (auto& f : factors) {
    while (delays > 0 && f[2] == 0.0L) {
      f = {0.0L, f[0], f[1]};
      --delays;
    }
  }
  while (factors.size() < kGammatoneOrder) {
    if (delays >= 2) {
      factors.push_back({0.0L, 0.0L, 1.0L});
      delays -= 2;
    } else if (delays == 1) {
      factors.push_back({0.0L, 1.0L, 0.0L});
      delays = 0;
    } else {
      factors.push_back({1.0L, 0.0L, 0.0L});
    }
  }
  if (factors.size() != kGammatoneOrder || delays != 0) {
    throw DesignError("design: numerator factorization failed at f_c = " + std::to_string(f_c));
  }

  FilterCascade cascade;
  cascade.f_c = f_c;
  cascade.bandwidth = b;
  cascade.sample_rate = sample_rate;
  const double a1 = static_cast<double>(-2.0L * p.real());
  const double a2 = static_cast<double>(std::norm(p));
  for (std::size_t i = 0; i < kGammatoneOrder; ++i) {
    const long double lead = i == 0 ? poly.back() : 1.0L;
    auto& s = cascade.sections[i];
    s.b0 = static_cast<double>(lead * factors[i][0]);
    s.b1 = static_cast<double>(lead * factors[i][1]);
    s.b2 = static_cast<double>(lead * factors[i][2]);
    s.a1 = a1;
    s.a2 = a2;
  }

  const double gain = cascade.magnitude(f_c);
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw DesignError("design: degenerate gain at f_c = " + std::to_string(f_c));
  }
  const double per_section = std::pow(gain, -1.0 / kGammatoneOrder);
  for (auto& s : cascade.sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return cascade;
}

Filterbank::Filterbank(const FilterbankConfig& cfg, double sample_rate)
    : sample_rate_(sample_rate) {
  const FilterbankConfig r = cfg.resolved(sample_rate);
  const auto fc = center_frequencies(r);
  if (!r.bandwidth_hz.empty() && r.bandwidth_hz.size() != fc.size()) {
    throw InputError("filterbank: bandwidth_hz needs one entry per channel");
  }
  channels_.reserve(fc.size());
  for (std::size_t i = 0; i < fc.size(); ++i) {
    channels_.push_back(
        design_channel(fc[i], sample_rate, r.bandwidth_hz.empty() ? 0.0 : r.bandwidth_hz[i]));
  }
  reset();
}

Filterbank::Filterbank(std::vector<FilterCascade> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) throw InputError("filterbank: no channels");
  sample_rate_ = channels_.front().sample_rate;
  for (const auto& c : channels_) {
    if (c.sample_rate != sample_rate_) {
      throw InputError("filterbank: channels designed for different sample rates");
    }
  }
  reset();
}

void Filterbank::reset() {
  state_.assign(channels_.size(), {});
}

void Filterbank::process_chunk(std::span<const double> x,
                               std::vector<std::vector<double>>& out) {
  out.resize(channels_.size());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const auto& sections = channels_[c].sections;
    auto& st = state_[c];
    auto& y = out[c];
    const std::size_t offset = y.size();
    y.resize(offset + x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = x[i];
      for (std::size_t k = 0; k < kGammatoneOrder; ++k) {
        const auto& s = sections[k];
        auto& z = st[k];
        const double o = s.b0 * v + z[0];
        z[0] = s.b1 * v - s.a1 * o + z[1];
        z[1] = s.b2 * v - s.a2 * o;
        v = o;
      }
      y[offset + i] = v;
    }
  }
}

MultiChannelSeries Filterbank::process(const TimeSeries& x) {
  if (x.sample_rate() != sample_rate_) {
    throw InputError("filterbank designed for " + std::to_string(sample_rate_) +
                     " Hz, input is " + std::to_string(x.sample_rate()) + " Hz");
  }
  std::vector<std::vector<double>> out;
  process_chunk(x.samples(), out);
  return MultiChannelSeries(sample_rate_, std::move(out), x.t0());
}

}  // namespace spikevib::cochlea
