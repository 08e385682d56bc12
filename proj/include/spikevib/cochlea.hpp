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

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "spikevib/signal.hpp"

namespace spikevib::cochlea {

inline constexpr int kGammatoneOrder = 4;

// Parameters of the analytic gammatone
//   g(t) = a t^(n-1) exp(-2 pi b t) cos(2 pi f_c t + phi).
struct GammatoneSpec {
  double f_c = 1000.0;
  double b = 100.0;
  int n = kGammatoneOrder;
  double a = 1.0;
  double phi = 0.0;
};

// Direct evaluation of the analytic impulse response (t >= 0).
double impulse_response_reference(const GammatoneSpec& spec, double t);

// Glasberg & Moore equivalent rectangular bandwidth.
double erb_hz(double f_hz);

// 1.019 * ERB(f_c), the usual gammatone bandwidth.
double default_bandwidth_hz(double f_c);

struct FilterbankConfig {
  std::size_t n_channels = 16;
  double f_min_hz = 20.0;
  // <= 0 means 0.4 * sample_rate, resolved at design time.
  double f_max_hz = 0.0;
  // Empty, or one bandwidth per channel overriding default_bandwidth_hz().
  std::vector<double> bandwidth_hz;

  FilterbankConfig resolved(double sample_rate) const;
};

// Geometric progression from f_min to f_max inclusive. A single channel
// yields {f_min}. Requires a resolved config.
std::vector<double> center_frequencies(const FilterbankConfig& cfg);

// One second-order section, H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2),
// run in transposed direct form II.
struct BiquadSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double f_hz, double sample_rate) const;
  std::array<std::complex<double>, 2> poles() const;
};

// Four biquads whose product approximates an order-4 gammatone at f_c,
// normalized to unit gain at f_c.
struct FilterCascade {
  std::array<BiquadSection, kGammatoneOrder> sections;
  double f_c = 0.0;
  double bandwidth = 0.0;
  double sample_rate = 0.0;

  std::complex<double> response(double f_hz) const;
  double magnitude(double f_hz) const { return std::abs(response(f_hz)); }
};

// Throws DesignError when f_c is outside (0, 0.45 * sample_rate] or the
// bandwidth is not positive. bandwidth_hz <= 0 selects the ERB default.
FilterCascade design_channel(double f_c, double sample_rate, double bandwidth_hz = 0.0);

// Bank of cascades with persistent per-channel state. Calling process() on
// consecutive chunks is bit-identical to one call on the concatenation.
class Filterbank {
 public:
  Filterbank(const FilterbankConfig& cfg, double sample_rate);
  explicit Filterbank(std::vector<FilterCascade> channels);

  double sample_rate() const noexcept { return sample_rate_; }
  std::size_t n_channels() const noexcept { return channels_.size(); }
  const std::vector<FilterCascade>& channels() const noexcept { return channels_; }

  MultiChannelSeries process(const TimeSeries& x);

  // Appends one filtered chunk per channel to out[c] (resized as needed).
  void process_chunk(std::span<const double> x, std::vector<std::vector<double>>& out);

  void reset();

 private:
  using SectionState = std::array<double, 2>;

  std::vector<FilterCascade> channels_;
  std::vector<std::array<SectionState, kGammatoneOrder>> state_;
  double sample_rate_ = 0.0;
};

}  // namespace spikevib::cochlea
