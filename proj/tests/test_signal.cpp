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
#include <limits>

#include "gen.hpp"
#include "spikevib/error.hpp"
#include "spikevib/signal.hpp"

using namespace spikevib;

namespace {

std::vector<double> values(const TimeSeries& x) { return {x.samples().begin(), x.samples().end()}; }

}  // namespace

TEST(TimeSeries, RejectsBadRateAndSamples) {
  EXPECT_THROW(TimeSeries(0.0, {1.0}), InputError);
  EXPECT_THROW(TimeSeries(-5.0, {1.0}), InputError);
  EXPECT_THROW(TimeSeries(10.0, {1.0, std::numeric_limits<double>::quiet_NaN()}), InputError);
  EXPECT_THROW(TimeSeries(10.0, {std::numeric_limits<double>::infinity()}), InputError);
}

TEST(TimeSeries, DurationAndClock) {
  TimeSeries x(20000.0, std::vector<double>(20000, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(x.duration(), 1.0);
  EXPECT_DOUBLE_EQ(x.time_of(10000), 2.5);
}

TEST(Concat, EmptyIsIdentity) {
  TimeSeries x(100.0, {1.0, 2.0, 3.0});
  TimeSeries empty(100.0, {});
  EXPECT_EQ(values(concat(x, empty)), values(x));
}

TEST(Concat, AppendsSamples) {
  const auto y = concat(TimeSeries(10.0, {1.0, 2.0}, 0.5), TimeSeries(10.0, {3.0}, 9.0));
  EXPECT_EQ(values(y), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(y.t0(), 0.5);
}

TEST(Concat, TwoIbfTrials) {
  const double fs = 97656.0;
  const std::size_t n = 6 * 97656;
  const auto y = concat(TimeSeries(fs, std::vector<double>(n, 0.0)), TimeSeries(fs, std::vector<double>(n, 0.0)));
  EXPECT_EQ(y.size(), 1171872u);
  EXPECT_DOUBLE_EQ(y.duration(), 12.0);
}

TEST(Concat, RateMismatchRejected) {
  EXPECT_THROW(concat(TimeSeries(10.0, {1.0}), TimeSeries(20.0, {1.0})), InputError);
}

TEST(Concat, AssociativeOnRandomSeries) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = rng.series(50.0, rng.index(40));
    const auto b = rng.series(50.0, rng.index(40));
    const auto c = rng.series(50.0, rng.index(40));
    EXPECT_EQ(values(concat(concat(a, b), c)), values(concat(a, concat(b, c))));
  }
}

TEST(Slice, WholeRangeIsIdentity) {
  gen::Rng rng(3);
  const auto x = rng.series(1000.0, 777);
  EXPECT_EQ(values(slice(x, 0.0, x.duration())), values(x));
}

TEST(Slice, OneSecondAt20kHz) {
  const TimeSeries x(20000.0, std::vector<double>(60000, 1.0));
  const auto s = slice(x, 1.0, 2.0);
  EXPECT_EQ(s.size(), 20000u);
  EXPECT_DOUBLE_EQ(s.t0(), 1.0);
}

TEST(Slice, CalibrationWindowOfAnIbfRun) {
  const TimeSeries run(97656.0, std::vector<double>(1171872, 0.0));
  EXPECT_EQ(slice(run, 0.0, 3.0).size(), 292968u);
}

TEST(Slice, OutOfRangeRejected) {
  const TimeSeries x(10.0, std::vector<double>(10, 0.0));
  EXPECT_THROW(slice(x, -0.1, 0.5), InputError);
  EXPECT_THROW(slice(x, 0.5, 0.5), InputError);
  EXPECT_THROW(slice(x, 0.0, 1.5), InputError);
}

TEST(Slice, RecoversFirstOperandOfConcat) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = rng.series(200.0, 1 + rng.index(300));
    const auto b = rng.series(200.0, 1 + rng.index(300));
    EXPECT_EQ(values(slice(concat(a, b), 0.0, a.duration())), values(a));
  }
}

TEST(SpikeTrain, TotalOrder) {
  const SpikeTrain t({{1.0, 2, Polarity::kUp},
                      {1.0, 1, Polarity::kDown},
                      {1.0, 1, Polarity::kUp},
                      {0.5, 7, Polarity::kUp}},
                     2.0);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.events()[0], (SpikeEvent{0.5, 7, Polarity::kUp}));
  EXPECT_EQ(t.events()[1], (SpikeEvent{1.0, 1, Polarity::kUp}));
  EXPECT_EQ(t.events()[2], (SpikeEvent{1.0, 1, Polarity::kDown}));
  EXPECT_EQ(t.events()[3], (SpikeEvent{1.0, 2, Polarity::kUp}));
}

TEST(SpikeTrain, SortingTwiceIsNoOp) {
  gen::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto ev = rng.events(500, 8, 3.0);
    // Force ties.
    for (std::size_t i = 0; i + 1 < ev.size(); i += 7) ev[i + 1].time = ev[i].time;
    const SpikeTrain once(ev, 3.0);
    const SpikeTrain twice({once.events().begin(), once.events().end()}, 3.0);
    EXPECT_EQ(once, twice);
    for (std::size_t i = 1; i < once.size(); ++i) {
      EXPECT_FALSE(event_less(once.events()[i], once.events()[i - 1]));
    }
  }
}

TEST(SpikeTrain, RejectsInvalidTimes) {
  EXPECT_THROW(SpikeTrain({{-0.1, 0, Polarity::kUp}}, 1.0), InputError);
  EXPECT_THROW(SpikeTrain({{1.5, 0, Polarity::kUp}}, 1.0), InputError);
  EXPECT_THROW(SpikeTrain({{std::numeric_limits<double>::quiet_NaN(), 0, Polarity::kUp}}, 1.0), InputError);
  EXPECT_NO_THROW(SpikeTrain({{1.0, 0, Polarity::kUp}}, 1.0));
}

TEST(RateInWindow, EmptyIsZero) {
  EXPECT_EQ(rate_in_window(SpikeTrain({}, 1.0), 0, 0.0, 1.0), 0.0);
}

TEST(RateInWindow, HundredEventsInOneSecond) {
  std::vector<SpikeEvent> ev;
  for (int i = 0; i < 100; ++i) ev.push_back({0.005 + 0.01 * i, 3, Polarity::kUp});
  ev.push_back({0.5, 3, Polarity::kDown});
  ev.push_back({0.5, 4, Polarity::kUp});
  const SpikeTrain t(ev, 1.0);
  EXPECT_DOUBLE_EQ(rate_in_window(t, 3, 0.0, 1.0), 100.0);
  EXPECT_DOUBLE_EQ(rate_in_window(t, 3, 0.0, 1.0, Polarity::kDown), 1.0);
  EXPECT_DOUBLE_EQ(rate_in_window(t, 3, 0.0, 0.5), 100.0);
}

TEST(RateInWindow, MatchesBruteForceCount) {
  gen::Rng rng(23);
  const SpikeTrain t(rng.events(2000, 4, 10.0), 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(0.0, 9.0);
    const double b = a + rng.uniform(0.01, 1.0);
    const auto ch = static_cast<std::uint32_t>(rng.index(4));
    std::size_t n = 0;
    for (const auto& e : t.events()) n += e.channel == ch && e.polarity == Polarity::kUp && e.time >= a && e.time < b;
    EXPECT_DOUBLE_EQ(rate_in_window(t, ch, a, b), static_cast<double>(n) / (b - a));
  }
}
