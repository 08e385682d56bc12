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

#include "spikevib/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "spikevib/error.hpp"

namespace spikevib::synth {

void validate(const SynthSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw InputError("synth: duration must be positive");
  if (!(spec.sample_rate > 0.0)) throw InputError("synth: sample rate must be positive");
  if (!(spec.noise_std >= 0.0)) throw InputError("synth: noise_std must be >= 0");
  double f_max = 0.0;
  for (const auto& c : spec.components) {
    if (!(c.frequency_hz >= 0.0)) throw InputError("synth: negative component frequency");
    f_max = std::max(f_max, c.frequency_hz);
  }
  if (spec.anomaly.kind != AnomalyKind::kNone) {
    if (!(spec.anomaly.onset_s >= 0.0) || !(spec.anomaly.onset_s < spec.duration_s)) {
      throw InputError("synth: anomaly onset must lie in [0, duration)");
    }
    if (!(spec.anomaly.factor > 0.0)) throw InputError("synth: anomaly factor must be positive");
    if (spec.anomaly.kind == AnomalyKind::kRateShift) {
      f_max = std::max(f_max, f_max * spec.anomaly.factor);
    }
  }
  if (!(spec.sample_rate > 2.0 * f_max)) {
    throw InputError("synth: sample rate " + std::to_string(spec.sample_rate) +
                     " Hz violates Nyquist for " + std::to_string(f_max) + " Hz");
  }
}

TimeSeries synth(const SynthSpec& spec) {
  validate(spec);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
  const auto onset = spec.anomaly.kind == AnomalyKind::kNone
                         ? n
                         : static_cast<std::size_t>(std::llround(spec.anomaly.onset_s * spec.sample_rate));
  std::vector<double> x(n, 0.0);

  const double dt = 1.0 / spec.sample_rate;
  for (const auto& c : spec.components) {
    const double f_after =
        spec.anomaly.kind == AnomalyKind::kRateShift ? c.frequency_hz * spec.anomaly.factor
                                                     : c.frequency_hz;
    for (std::size_t i = 0; i < n; ++i) {
      // Phase accumulates piecewise so the sinusoid stays continuous at onset.
      double phase;
      if (i < onset) {
        phase = 2.0 * std::numbers::pi * c.frequency_hz * static_cast<double>(i) * dt;
      } else {
        phase = 2.0 * std::numbers::pi *
                (c.frequency_hz * static_cast<double>(onset) +
                 f_after * static_cast<double>(i - onset)) * dt;
      }
      x[i] += c.amplitude * std::sin(phase);
    }
  }
  if (spec.noise_std > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (auto& v : x) v += noise(rng);
  }
  if (spec.anomaly.kind == AnomalyKind::kAmplitudeBurst) {
    for (std::size_t i = onset; i < n; ++i) x[i] *= spec.anomaly.factor;
  }
  return TimeSeries(spec.sample_rate, std::move(x));
}

}  // namespace spikevib::synth
