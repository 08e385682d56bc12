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

#include <filesystem>

#include "spikevib/config.hpp"
#include "spikevib/error.hpp"

using namespace spikevib;

namespace {
const std::filesystem::path kConfigs = std::filesystem::path(SPIKEVIB_SOURCE_DIR) / "configs";
}

TEST(Config, DefaultsValidate) {
  const auto cfg = default_config();
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_EQ(cfg.bsnn.n, cfg.filterbank.n_channels);
}

TEST(Config, RoundTripPreservesHash) {
  const auto cfg = default_config({"encoder.f_target_hz=123.5", "snn.w_inh=0.07", "seed=42"});
  const auto again = parse_config(to_toml(cfg));
  EXPECT_EQ(to_toml(again), to_toml(cfg));
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  EXPECT_EQ(again.calib.f_target, 123.5);
  EXPECT_EQ(again.bsnn.w_inh, 0.07);
  EXPECT_EQ(again.seed, 42u);
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = default_config();
  EXPECT_EQ(config_hash(a), config_hash(default_config()));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(default_config({"snn.alpha=1.5"})));
}

TEST(Config, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config("[encoder]\nbogus = 1\n"), InputError);
  EXPECT_THROW(parse_config("[nope]\nx = 1\n"), InputError);
  EXPECT_THROW(parse_config("mystery = 3\n"), InputError);
  EXPECT_THROW(default_config({"snn.nothing=1"}), InputError);
}

TEST(Config, ParseErrorCarriesLine) {
  try {
    parse_config("seed = 1\n[encoder]\nt_adapt_s = = 2\n", "bad.toml");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("bad.toml:3"), std::string::npos);
  }
}

TEST(Config, OutOfRangeValuesRejected) {
  EXPECT_THROW(default_config({"encoder.t_adapt_s=0"}), InputError);
  EXPECT_THROW(default_config({"tuning.headroom=1.0"}), InputError);
  EXPECT_THROW(default_config({"encoder.t_adapt_s=5", "tuning.window_s=3"}), InputError);
  EXPECT_THROW(default_config({"filterbank.n_channels=1"}), InputError);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"synthetic.toml", "ibf.toml", "r2f.toml"}) {
    EXPECT_NO_THROW(validate(load_config(kConfigs / name))) << name;
  }
  const auto r2f = load_config(kConfigs / "r2f.toml");
  EXPECT_EQ(r2f.calib.t_adapt, 60.0);
  EXPECT_EQ(r2f.datasets.r2f_columns.size(), 4u);
}

TEST(SynthSpec, ParseAndRoundTrip) {
  const char* text = R"(duration_s = 4.0
sample_rate_hz = 8000.0
noise_std = 0.5
seed = 7
[[component]]
frequency_hz = 60.0
amplitude = 1.0
[[component]]
frequency_hz = 700.0
amplitude = 0.25
[anomaly]
kind = "amplitude-burst"
factor = 3.0
onset_s = 2.0
)";
  const auto s = parse_synth_spec(text);
  EXPECT_EQ(s.components.size(), 2u);
  EXPECT_EQ(s.components[1].frequency_hz, 700.0);
  EXPECT_EQ(s.anomaly.kind, synth::AnomalyKind::kAmplitudeBurst);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(to_toml(parse_synth_spec(to_toml(s))), to_toml(s));
  EXPECT_THROW(parse_synth_spec("[anomaly]\nkind = \"sideways\"\n"), InputError);
}
