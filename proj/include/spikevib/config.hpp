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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spikevib/cochlea.hpp"
#include "spikevib/encoder.hpp"
#include "spikevib/snn.hpp"
#include "spikevib/synth.hpp"

namespace spikevib {

struct TuningConfig {
  // Length of the tuning window, which starts when calibration ends.
  double window_s = 3.0;
  // See snn::TuneOptions::headroom.
  double headroom = 0.1;
  snn::TuneGrid grid;
};

struct DatasetConfig {
  double ibf_sample_rate_hz = 97656.0;
  // Index (0-based, in build order) of the IBF run used for tuning.
  std::size_t ibf_tuning_run = 0;
  double r2f_sample_rate_hz = 20000.0;
  std::size_t r2f_samples_per_file = 20480;
  // Sensor column per bearing; bearing k reads column r2f_columns[k - 1].
  std::vector<std::size_t> r2f_columns = {0, 1, 2, 3};
  bool r2f_tune_per_bearing = false;
  // 1-based bearing whose window sets the shared parameters.
  std::size_t r2f_tuning_bearing = 1;
};

struct PipelineConfig {
  cochlea::FilterbankConfig filterbank;
  encoder::AdmConfig adm;
  encoder::CalibConfig calib;
  snn::BsnnConfig bsnn;
  snn::LifParams lif;
  TuningConfig tuning;
  bool poisson_enabled = false;
  double poisson_interval_s = 1.0;
  std::size_t chunk_samples = 65536;
  std::uint64_t seed = 0;
  DatasetConfig datasets;
};

// Throws InputError when a field is out of range or the stages disagree
// (channel counts, t_adapt longer than the tuning window).
void validate(const PipelineConfig& cfg);

// Parses the TOML pipeline schema. Unknown keys are rejected. Each override
// has the form "section.key=value"; the value is read as a TOML value, or as
// a bare string when that fails.
PipelineConfig parse_config(std::string_view text, const std::string& source = "<config>",
                            const std::vector<std::string>& overrides = {});
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});
// Defaults plus overrides.
PipelineConfig default_config(const std::vector<std::string>& overrides = {});

// Fully resolved config in a fixed key order; parse_config(to_toml(c))
// reproduces c.
std::string to_toml(const PipelineConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
// 16 lowercase hex digits of fnv1a64(to_toml(cfg)).
std::string config_hash(const PipelineConfig& cfg);

synth::SynthSpec parse_synth_spec(std::string_view text, const std::string& source = "<spec>");
synth::SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string to_toml(const synth::SynthSpec& spec);

}  // namespace spikevib
