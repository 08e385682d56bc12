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

#include <cstdint>
#include <vector>

#include "spikevib/signal.hpp"

namespace spikevib::synth {

struct Component {
  double frequency_hz = 0.0;
  double amplitude = 0.0;
};

enum class AnomalyKind { kNone, kRateShift, kAmplitudeBurst };

struct Anomaly {
  AnomalyKind kind = AnomalyKind::kNone;
  // Frequency multiplier (rate shift) or gain (amplitude burst).
  double factor = 1.0;
  double onset_s = 0.0;
};

struct SynthSpec {
  double duration_s = 10.0;
  double sample_rate = 20000.0;
  std::vector<Component> components;
  double noise_std = 0.0;
  Anomaly anomaly;
  std::uint64_t seed = 0;
};

// Throws InputError on Nyquist violation, onset outside the signal, or
// non-positive duration / rate.
void validate(const SynthSpec& spec);

// Sum of sines plus seeded Gaussian noise. A rate shift multiplies every
// component frequency from the onset on (phase-continuous); an amplitude
// burst scales the whole signal from the onset on.
TimeSeries synth(const SynthSpec& spec);

}  // namespace spikevib::synth
