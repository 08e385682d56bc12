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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spikevib/config.hpp"
#include "spikevib/datasets.hpp"
#include "spikevib/encoder.hpp"
#include "spikevib/signal.hpp"
#include "spikevib/snn.hpp"

namespace spikevib::bench {

// Filterbank and ADM run chunk by chunk over x (cfg.chunk_samples per
// chunk). Samples at or after t_stop are not processed.
encoder::EncodeResult encode_stream(const TimeSeries& x, const PipelineConfig& cfg,
                                    bool diagnostics = false,
                                    double t_stop = std::numeric_limits<double>::infinity());

// Applies the optional Poisson regeneration to the encoder output.
SpikeTrain snn_input(const SpikeTrain& up, const PipelineConfig& cfg);

snn::BsnnNetwork network_template(const PipelineConfig& cfg);

// Tunes on [t_adapt, t_adapt + tuning.window_s) of an encoded run; the
// network receives nothing before t_adapt.
snn::TuneResult tune_on(const SpikeTrain& up, const PipelineConfig& cfg);

// Encodes just enough of x for the tuning window, then tunes.
snn::TuneResult tune_series(const TimeSeries& x, const PipelineConfig& cfg);

// Network with the tuned output weight and time constant.
snn::BsnnNetwork tuned_network(const PipelineConfig& cfg, double w_ho, double tau_c);

// Simulates the tuned network on an encoded run and returns the time of the
// first output spike at or after t_adapt.
std::optional<double> first_detection(const SpikeTrain& up, double duration,
                                      const PipelineConfig& cfg, const snn::TuneResult& tuned,
                                      snn::SimTrace* trace = nullptr);

enum class Verdict { kTP, kFP, kTN, kFN };

const char* to_string(Verdict v) noexcept;

struct DetectionReport {
  std::string run_id;
  std::string label;
  std::optional<double> first_spike_t;
  std::optional<std::size_t> detection_datapoint;
  std::optional<double> latency;
  // Absent for run-to-failure streams, which carry no ground truth.
  std::optional<Verdict> verdict;
  // Spike before the transition on a healthy-defective run.
  bool early_alarm = false;
  std::string config_hash;
};

// floor(t / recording_duration) + 1; a time on a boundary belongs to the
// next recording.
std::size_t detection_datapoint(double t, double recording_duration);

DetectionReport run_pipeline(const datasets::RunSpec& run, const PipelineConfig& cfg,
                             const snn::TuneResult& tuned);
DetectionReport run_pipeline(const datasets::R2fStream& stream, const PipelineConfig& cfg,
                             const snn::TuneResult& tuned);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

// Reports without a verdict are skipped.
Confusion confusion_matrix(const std::vector<DetectionReport>& reports);

struct ReferenceRow {
  std::size_t bearing = 0;
  std::optional<std::size_t> detected;
  std::size_t reference = 0;
  std::size_t lssvm = 0;
  std::optional<std::size_t> aec;
  // detected - reference, when detected.
  std::optional<long> delta;
};

// Published detection datapoints per bearing (1..4) for this method and the
// LSSVM and AEC baselines.
ReferenceRow reference_row(std::size_t bearing);

std::vector<ReferenceRow> compare_table1(const std::vector<DetectionReport>& reports);

struct LatencyStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
};

LatencyStats latency_stats(const std::vector<DetectionReport>& reports);

struct IbfResult {
  std::string tuning_run;
  snn::TuneResult tuned;
  std::vector<DetectionReport> reports;
  Confusion confusion;
  LatencyStats latency;
};

IbfResult bench_ibf(const std::vector<datasets::RunSpec>& runs, const PipelineConfig& cfg);

struct R2fResult {
  std::vector<snn::TuneResult> tuned;  // one per stream
  std::vector<DetectionReport> reports;
  std::vector<ReferenceRow> rows;
};

R2fResult bench_r2f(const std::vector<datasets::R2fStream>& streams, const PipelineConfig& cfg);

// JSON documents (two-space indent, trailing newline).
std::string to_json(const DetectionReport& r);
std::string to_json(const IbfResult& r);
std::string to_json(const R2fResult& r, const std::string& config_hash);
std::string to_json(const snn::TuneResult& r, const std::string& config_hash);

// Reads w_ho and tau_c from a document written by to_json(TuneResult).
snn::TuneResult parse_tuned_json(const std::string& text, const std::string& source);

// bearing,detected,reference,lssvm,aec,delta with "none" for missing values.
std::string to_csv(const std::vector<ReferenceRow>& rows, const std::string& config_hash);

}  // namespace spikevib::bench
