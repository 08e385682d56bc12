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
#include <random>

#include "gen.hpp"
#include "spikevib/cochlea.hpp"
#include "spikevib/encoder.hpp"
#include "spikevib/error.hpp"

using namespace spikevib;
using namespace spikevib::encoder;

namespace {

AdmChannelState fresh(double thr, double ref = 0.0, const AdmConfig& cfg = {}) {
  return make_state(0, thr, ref, cfg, false);
}

MultiChannelSeries noise_bank(std::uint64_t seed, double fs, double seconds,
                              const cochlea::FilterbankConfig& fb) {
  gen::Rng rng(seed);
  cochlea::Filterbank bank(fb, fs);
  return bank.process(rng.series(fs, static_cast<std::size_t>(seconds * fs)));
}

}  // namespace

TEST(EncodeStep, ConstantInputIsSilent) {
  AdmConfig cfg;
  auto s = make_state(0, 0.1, 3.0, cfg, false);
  std::vector<SpikeEvent> out;
  for (int i = 0; i < 10000; ++i) encode_step(s, 3.0, i * 1e-4, cfg, &out);
  EXPECT_TRUE(out.empty());
}

TEST(EncodeStep, RampGivesSlopeOverThreshold) {
  // x(t) = t sampled at 10 kHz, threshold 0.01: one UP every 10 ms.
  AdmConfig cfg;
  auto s = fresh(0.01);
  std::vector<SpikeEvent> out;
  const double fs = 10000.0;
  for (int i = 0; i < 10000; ++i) encode_step(s, i / fs, i / fs, cfg, &out);
  EXPECT_NEAR(static_cast<double>(out.size()), 100.0, 1.0);
  for (const auto& e : out) EXPECT_EQ(e.polarity, Polarity::kUp);
}

TEST(EncodeStep, StepEmitsMultipleSpikesAndSubtracts) {
  AdmConfig cfg;
  auto s = fresh(0.25);
  const auto n = encode_step(s, 1.0, 0.0, cfg);
  EXPECT_EQ(n.up, 4u);
  EXPECT_EQ(n.down, 0u);
  EXPECT_DOUBLE_EQ(s.ref_level, 1.0);
  const auto m = encode_step(s, 0.4, 1.0, cfg);
  EXPECT_EQ(m.down, 2u);
  EXPECT_DOUBLE_EQ(s.ref_level, 0.5);
}

TEST(EncodeStep, RefractoryPeriodIsRespectedExactly) {
  AdmConfig cfg;
  cfg.t_r = 0.005;
  auto s = fresh(0.001, 0.0, cfg);
  std::vector<SpikeEvent> out;
  const double fs = 10000.0;
  for (int i = 0; i < 5000; ++i) encode_step(s, static_cast<double>(i), i / fs, cfg, &out);
  ASSERT_GT(out.size(), 10u);
  for (std::size_t k = 1; k < out.size(); ++k) EXPECT_GE(out[k].time - out[k - 1].time, cfg.t_r - 1e-12);
  // One spike per refractory period when the drive is unlimited.
  EXPECT_NEAR(static_cast<double>(out.size()), 0.5 / cfg.t_r, 1.0);
}

TEST(EncodeStep, ReconstructionStaysWithinThreshold) {
  gen::Rng rng(5);
  AdmConfig cfg;
  const double thr = 0.05;
  auto s = fresh(thr);
  double recon = 0.0;
  double x = 0.0;
  for (int i = 0; i < 100000; ++i) {
    x += rng.normal(0.0, 0.1);
    const auto n = encode_step(s, x, i * 1e-4, cfg);
    recon += thr * (static_cast<double>(n.up) - static_cast<double>(n.down));
    ASSERT_LT(std::abs(x - recon), thr) << "sample " << i;
  }
}

TEST(EncodeStep, NonMonotoneTimeRejected) {
  AdmConfig cfg;
  auto s = fresh(0.1);
  encode_step(s, 0.0, 1.0, cfg);
  EXPECT_THROW(encode_step(s, 0.0, 1.0, cfg), ContractError);
  EXPECT_THROW(encode_step(s, 0.0, 0.5, cfg), ContractError);
}

TEST(Calibration, FixedPointIsNoOp) {
  CalibConfig cal;
  const auto g = CalibrationGains::from(cal, 20000.0, 0.3, 1e-9);
  EXPECT_DOUBLE_EQ(g.a_target, 500.0 / 20000.0);
  EXPECT_DOUBLE_EQ(g.eta, 0.01 * 0.3);
  EXPECT_EQ(threshold_update(0.7, g.a_target, g), 0.7);
}

TEST(Calibration, ActivityAverageConvergesGeometrically) {
  CalibConfig cal;
  cal.tau_avg = 50.0;
  const auto g = CalibrationGains::from(cal, 20000.0, 1.0, 1e-9);
  AdmChannelState s = fresh(1.0);
  for (int k = 1; k <= 200; ++k) {
    calibrate_step(s, true, false, g);
    const double expected = 1.0 - std::pow(1.0 - 1.0 / cal.tau_avg, k);
    ASSERT_NEAR(s.a_up, expected, 1e-12);
    ASSERT_NEAR(s.a_dn, 0.0, 0.0);
  }
}

TEST(Calibration, ThresholdMovesWithActivityError) {
  CalibConfig cal;
  const auto g = CalibrationGains::from(cal, 20000.0, 1.0, 1e-6);
  gen::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(0.01, 2.0);
    const double a = rng.uniform(0.0, 1.0);
    const double next = threshold_update(v, a, g);
    if (a > g.a_target) EXPECT_GT(next, v);
    if (a < g.a_target) EXPECT_LE(next, v);
    EXPECT_GE(next, g.thr_floor);
  }
  EXPECT_EQ(threshold_update(1e-6, 0.0, g), 1e-6);
}

TEST(AdmEncoder, ZeroInputGivesNoSpikes) {
  MultiChannelSeries x(20000.0, std::vector<std::vector<double>>(4, std::vector<double>(80000, 0.0)));
  const auto r = encode(x, {}, {});
  EXPECT_TRUE(r.up.empty());
  EXPECT_TRUE(r.trace.down.empty());
}

TEST(AdmEncoder, CalibrationLongerThanSignalRejected) {
  MultiChannelSeries x(20000.0, std::vector<std::vector<double>>(2, std::vector<double>(1000, 0.0)));
  CalibConfig cal;
  cal.t_adapt = 1.0;
  EXPECT_THROW(encode(x, {}, cal), InputError);
}

TEST(AdmEncoder, InitialThresholdIsStdOfFirstWindow) {
  const auto y = noise_bank(11, 20000.0, 4.0, {4, 100.0, 2000.0, {}});
  const auto r = encode(y, {}, {});
  const std::size_t n = 2000;
  for (std::size_t c = 0; c < 4; ++c) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += y.channel(c)[i];
    m /= n;
    for (std::size_t i = 0; i < n; ++i) v += (y.channel(c)[i] - m) * (y.channel(c)[i] - m);
    EXPECT_NEAR(r.trace.v_thr_init[c], std::sqrt(v / n), 1e-12 * std::sqrt(v / n));
  }
}

TEST(AdmEncoder, ThresholdsFrozenAfterCalibration) {
  const auto y = noise_bank(12, 20000.0, 5.0, {3, 100.0, 2000.0, {}});
  CalibConfig cal;
  cal.t_adapt = 2.0;
  const auto r = encode(y, {}, cal);
  ASSERT_FALSE(r.trace.rows.empty());
  EXPECT_LT(r.trace.rows.back().time, cal.t_adapt);
  // The thresholds in force at the end equal those of the last calibration step.
  for (std::uint32_t c = 0; c < 3; ++c) {
    const TraceRow* last = nullptr;
    for (const auto& row : r.trace.rows) if (row.channel == c) last = &row;
    ASSERT_NE(last, nullptr);
    EXPECT_NEAR(last->time, cal.t_adapt - 1.0 / 20000.0, 1e-9);
    EXPECT_EQ(r.trace.v_thr_up[c], last->v_thr_up);
    EXPECT_EQ(r.trace.v_thr_dn[c], last->v_thr_dn);
    std::size_t emitted = 0;
    for (const auto& e : r.up.events()) emitted += (e.channel == c && e.time >= cal.t_adapt);
    EXPECT_GT(emitted, 0u);
  }
}

TEST(AdmEncoder, PostCalibrationRateNearTarget) {
  // Stationary noise in channels well below f_target keeps the encoder in its
  // linear regime, where a slow controller settles tightly.
  const double fs = 20000.0;
  CalibConfig cal;
  cal.t_adapt = 30.0;
  cal.f_target = 500.0;
  cal.eta = 3e-4;
  cal.tau_avg = 30000.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(static_cast<std::size_t>((cal.t_adapt + 10.0) * fs));
    for (auto& v : x) v = nd(rng);
    cochlea::Filterbank bank({8, 100.0, 400.0, {}}, fs);
    const auto r = encode(bank.process(TimeSeries(fs, x)), {}, cal);
    for (std::uint32_t c = 0; c < 8; ++c) {
      const double rate = rate_in_window(r.up, c, cal.t_adapt, cal.t_adapt + 10.0);
      EXPECT_NEAR(rate / cal.f_target, 1.0, 0.10) << "seed " << seed << " channel " << c;
    }
  }
}

TEST(AdmEncoder, ChunkingDoesNotChangeOutput) {
  const auto y = noise_bank(21, 20000.0, 4.0, {4, 50.0, 3000.0, {}});
  CalibConfig cal;
  cal.t_adapt = 1.0;
  const auto whole = encode(y, {}, cal);
  gen::Rng rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    AdmEncoder enc(4, y.sample_rate(), {}, cal);
    std::size_t i = 0;
    while (i < y.length()) {
      const std::size_t len = std::min(y.length() - i, 1 + rng.index(trial == 0 ? 7 : 9000));
      std::vector<std::vector<double>> chunk(4);
      for (std::size_t c = 0; c < 4; ++c) chunk[c].assign(y.channel(c).begin() + i, y.channel(c).begin() + i + len);
      enc.process_chunk(chunk);
      i += len;
    }
    const auto r = enc.finish(y.duration());
    EXPECT_EQ(r.up, whole.up);
    EXPECT_EQ(r.trace.down, whole.trace.down);
    EXPECT_EQ(r.trace.v_thr_up, whole.trace.v_thr_up);
  }
}

TEST(AdmEncoder, ChannelPermutationPermutesEvents) {
  const auto y = noise_bank(31, 20000.0, 3.0, {4, 50.0, 3000.0, {}});
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<std::vector<double>> permuted(4);
  for (std::size_t c = 0; c < 4; ++c) permuted[c].assign(y.channel(perm[c]).begin(), y.channel(perm[c]).end());
  CalibConfig cal;
  cal.t_adapt = 1.0;
  const auto a = encode(y, {}, cal);
  const auto b = encode(MultiChannelSeries(y.sample_rate(), permuted), {}, cal);
  for (std::uint32_t c = 0; c < 4; ++c) {
    std::vector<double> ta, tb;
    for (const auto& e : a.up.events()) if (e.channel == perm[c]) ta.push_back(e.time);
    for (const auto& e : b.up.events()) if (e.channel == c) tb.push_back(e.time);
    EXPECT_EQ(ta, tb) << "channel " << c;
  }
}

TEST(AdmEncoder, Deterministic) {
  const auto y = noise_bank(41, 20000.0, 2.0, {3, 50.0, 3000.0, {}});
  CalibConfig cal;
  cal.t_adapt = 0.5;
  EXPECT_EQ(encode(y, {}, cal).up, encode(y, {}, cal).up);
}

TEST(AdmEncoder, EventsSortedAndInsideDuration) {
  const auto y = noise_bank(51, 20000.0, 2.0, {5, 50.0, 3000.0, {}});
  CalibConfig cal;
  cal.t_adapt = 0.5;
  const auto r = encode(y, {}, cal);
  const auto ev = r.up.events();
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_FALSE(event_less(ev[i], ev[i - 1]));
  for (const auto& e : ev) {
    EXPECT_GE(e.time, 0.0);
    EXPECT_LT(e.time, y.duration());
    EXPECT_LT(e.channel, 5u);
  }
}
