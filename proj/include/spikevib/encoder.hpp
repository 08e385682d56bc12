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
#include <limits>
#include <span>
#include <vector>

#include "spikevib/signal.hpp"

namespace spikevib::encoder {

struct AdmConfig {
  // Minimum interval between same-polarity spikes on one channel (s).
  double t_r = 0.0;
  // Initial threshold; <= 0 selects the standard deviation of the first
  // init_window_s of each channel.
  double v_thr_init = 0.0;
  double thr_floor = 1e-9;
  double init_window_s = 0.1;
};

struct CalibConfig {
  double t_adapt = 3.0;
  double f_target = 500.0;
  // Controller gain in units of the channel's initial threshold per unit of
  // activity error.
  double eta = 0.01;
  // Running-average time constant, in steps (one step per input sample).
  double tau_avg = 1000.0;
};

void validate(const AdmConfig& cfg);
void validate(const CalibConfig& cal);

struct AdmChannelState {
  std::uint32_t channel = 0;
  double v_thr_up = 1.0;
  double v_thr_dn = 1.0;
  double ref_level = 0.0;
  double a_up = 0.0;
  double a_dn = 0.0;
  double last_spike_t_up = -std::numeric_limits<double>::infinity();
  double last_spike_t_dn = -std::numeric_limits<double>::infinity();
  double last_t = -std::numeric_limits<double>::infinity();
  bool calibrating = false;
};

// Fresh state with both thresholds at v_thr (clamped to the floor).
AdmChannelState make_state(std::uint32_t channel, double v_thr, double ref_level,
                           const AdmConfig& cfg, bool calibrating);

struct StepSpikes {
  std::uint32_t up = 0;
  std::uint32_t down = 0;
};

// Emits UP spikes while sample - ref_level >= v_thr_up and the refractory
// period has elapsed, adding v_thr_up to ref_level per spike; DOWN is
// symmetric. Events are appended to `out` when non-null. Throws
// ContractError unless t is strictly greater than the previous call's t.
StepSpikes encode_step(AdmChannelState& state, double sample, double t, const AdmConfig& cfg,
                       std::vector<SpikeEvent>* out = nullptr);

// Absolute controller constants for one channel at one step clock.
struct CalibrationGains {
  double a_target = 0.0;  // f_target * dt_step
  double eta = 0.0;       // absolute threshold units per unit activity
  double tau_avg = 1000.0;
  double thr_floor = 1e-9;

  static CalibrationGains from(const CalibConfig& cal, double sample_rate, double v_thr_init,
                               double thr_floor);
};

// v + eta * (activity - a_target), clamped to the floor.
double threshold_update(double v_thr, double activity, const CalibrationGains& g);

// Running-average then proportional threshold update for both polarities.
void calibrate_step(AdmChannelState& state, bool spiked_up, bool spiked_dn,
                    const CalibrationGains& g);

struct TraceRow {
  double time = 0.0;
  std::uint32_t channel = 0;
  double v_thr_up = 0.0;
  double v_thr_dn = 0.0;
  double a_up = 0.0;
  double a_dn = 0.0;
};

struct CalibrationTrace {
  SpikeTrain down;
  std::vector<TraceRow> rows;
  // Per-channel thresholds in force after calibration.
  std::vector<double> v_thr_up;
  std::vector<double> v_thr_dn;
  std::vector<double> v_thr_init;
};

struct EncodeResult {
  SpikeTrain up;
  CalibrationTrace trace;
};

// Streaming multi-channel ADM with an initial calibration window. Feeding
// consecutive chunks gives the same events as a single call on the whole
// signal.
class AdmEncoder {
 public:
  AdmEncoder(std::size_t n_channels, double sample_rate, const AdmConfig& cfg,
             const CalibConfig& cal, double trace_interval_s = 0.01,
             bool keep_diagnostics = true);

  // chunk[c] holds the next samples of channel c; all channels equal length.
  void process_chunk(std::span<const std::vector<double>> chunk);

  // Flushes buffered samples and returns everything emitted so far.
  EncodeResult finish(double duration);

  std::size_t n_channels() const noexcept { return states_.size(); }
  const std::vector<AdmChannelState>& states() const noexcept { return states_; }

 private:
  void start(std::span<const std::vector<double>> head);
  void run(std::size_t c, std::span<const double> x, std::size_t first_index);

  AdmConfig cfg_;
  CalibConfig cal_;
  double sample_rate_;
  std::size_t n_adapt_;
  std::size_t n_init_;
  std::size_t trace_every_;
  bool keep_diagnostics_;
  bool started_ = false;
  std::size_t consumed_ = 0;
  std::vector<std::vector<double>> pending_;
  std::vector<AdmChannelState> states_;
  std::vector<CalibrationGains> gains_;
  std::vector<double> v_thr_init_;
  std::vector<SpikeEvent> up_;
  std::vector<SpikeEvent> down_;
  std::vector<TraceRow> rows_;
};

// Whole-signal convenience wrapper. Throws InputError if t_adapt exceeds the
// signal duration or the input is empty.
EncodeResult encode(const MultiChannelSeries& x, const AdmConfig& cfg, const CalibConfig& cal,
                    double trace_interval_s = 0.01);

}  // namespace spikevib::encoder
