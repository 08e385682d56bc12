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

#include <gtest/gtest.h>

#include <cmath>

#include "spikevib/error.hpp"
#include "spikevib/synth.hpp"

using spikevib::InputError;
using namespace spikevib::synth;

namespace {

double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

TEST(Synth, EmptySpecIsSilence) {
  SynthSpec spec;
  spec.duration_s = 1.0;
  const auto x = synth(spec);
  ASSERT_EQ(x.size(), 20000u);
  for (double v : x.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Synth, NoiselessPeakBoundedByAmplitudeSum) {
  SynthSpec spec;
  spec.duration_s = 2.0;
  spec.components = {{50.0, 1.0}, {300.0, 0.5}};
  const auto x = synth(spec);
  double peak = 0.0;
  for (double v : x.samples()) peak = std::max(peak, std::abs(v));
  EXPECT_LE(peak, 1.5 + 1e-12);
  EXPECT_GT(peak, 1.3);
  EXPECT_NEAR(rms(x.samples()), std::sqrt((1.0 + 0.25) / 2.0), 1e-3);
}

TEST(Synth, AmplitudeBurstScalesRms) {
  SynthSpec spec;
  spec.duration_s = 10.0;
  spec.noise_std = 1.0;
  spec.components = {{50.0, 1.0}, {1200.0, 0.3}};
  spec.anomaly = {AnomalyKind::kAmplitudeBurst, 3.0, 5.0};
  spec.seed = 3;
  const auto x = synth(spec);
  const auto s = x.samples();
  EXPECT_NEAR(rms(s.subspan(100000)) / rms(s.first(100000)), 3.0, 0.15);
}

TEST(Synth, RateShiftMovesFrequency) {
  SynthSpec spec;
  spec.duration_s = 2.0;
  spec.components = {{100.0, 1.0}};
  spec.anomaly = {AnomalyKind::kRateShift, 2.0, 1.0};
  const auto x = synth(spec);
  auto crossings = [&](std::size_t a, std::size_t b) {
    int n = 0;
    for (std::size_t i = a + 1; i < b; ++i) n += (x[i - 1] < 0.0) != (x[i] < 0.0);
    return n;
  };
  EXPECT_NEAR(crossings(0, 20000), 200, 2);
  EXPECT_NEAR(crossings(20000, 40000), 400, 2);
  // Phase-continuous at the onset.
  EXPECT_LT(std::abs(x[20000] - x[19999]), 2.0 * 3.1416 * 200.0 / 20000.0);
}

TEST(Synth, SeedDeterminesNoise) {
  SynthSpec spec;
  spec.duration_s = 0.5;
  spec.noise_std = 1.0;
  spec.seed = 9;
  EXPECT_EQ(synth(spec).samples()[123], synth(spec).samples()[123]);
  auto other = spec;
  other.seed = 10;
  EXPECT_NE(synth(spec).samples()[123], synth(other).samples()[123]);
}

TEST(Synth, InvalidSpecsRejected) {
  SynthSpec spec;
  spec.components = {{10001.0, 1.0}};
  EXPECT_THROW(synth(spec), InputError);
  spec.components = {{6000.0, 1.0}};
  spec.anomaly = {AnomalyKind::kRateShift, 2.0, 1.0};
  EXPECT_THROW(synth(spec), InputError);
  spec = {};
  spec.anomaly = {AnomalyKind::kAmplitudeBurst, 2.0, 11.0};
  EXPECT_THROW(synth(spec), InputError);
  spec = {};
  spec.duration_s = 0.0;
  EXPECT_THROW(synth(spec), InputError);
}
