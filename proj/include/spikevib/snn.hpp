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
#include <vector>

#include "spikevib/signal.hpp"

namespace spikevib::snn {

// Leaky integrate-and-fire parameters. tau_c = r * c.
struct LifParams {
  double r = 1.0;
  double c = 0.02;
  double v_rest = 0.0;
  double v_thr = 1.0;
  double v_reset = 0.0;
  double t_ref = 1e-3;

  double tau_c() const noexcept { return r * c; }
  // Same resistance, capacitance chosen so that r * c == tau.
  LifParams with_tau_c(double tau) const;
};

void validate(const LifParams& p);

struct LifState {
  double v_mem = 0.0;
  // Time before which the neuron cannot fire.
  double refractory_until = -std::numeric_limits<double>::infinity();
};

inline LifState rest_state(const LifParams& p) { return {p.v_rest, -std::numeric_limits<double>::infinity()}; }

// Exact exponential leak over dt, then a jump by `impulse`. Fires (and resets
// to v_reset) when v_mem >= v_thr and t_end >= refractory_until, where t_end
// is the time at the end of the step.
bool lif_step(LifState& state, const LifParams& p, double impulse, double dt, double t_end);

struct BsnnConfig {
  std::size_t n = 16;
  double alpha = 1.25;
  double w_inh = 0.02;
  double w_ho = 0.1;
  double dt = 1e-4;

  // alpha * (n - 1) * w_inh
  double w_exc() const noexcept {
    return alpha * static_cast<double>(n - 1) * w_inh;
  }
};

void validate(const BsnnConfig& cfg);

struct Synapse {
  enum class Kind : std::uint8_t { kInputHidden, kHiddenOutput };
  Kind kind;
  std::uint32_t pre;
  std::uint32_t post;
  double weight;
};

// N input sources, N hidden LIF neurons, one LIF output neuron. Hidden j
// receives +w_exc from input j and -w_inh from every other input; every
// hidden neuron excites the output with +w_ho.
class BsnnNetwork {
 public:
  BsnnNetwork(const BsnnConfig& cfg, const LifParams& lif);

  const BsnnConfig& config() const noexcept { return cfg_; }
  const LifParams& hidden_params() const noexcept { return hidden_; }
  const LifParams& output_params() const noexcept { return output_; }
  std::size_t n() const noexcept { return cfg_.n; }
  double w_exc() const noexcept { return w_exc_; }
  double w_inh() const noexcept { return cfg_.w_inh; }
  double w_ho() const noexcept { return cfg_.w_ho; }

  // Explicit synapse list, mostly for inspection and tests.
  std::vector<Synapse> synapses() const;

  // Copy with a different output weight and global time constant.
  BsnnNetwork retuned(double w_ho, double tau_c) const;

 private:
  BsnnConfig cfg_;
  LifParams hidden_;
  LifParams output_;
  double w_exc_;
};

BsnnNetwork build_bsnn(const BsnnConfig& cfg, const LifParams& lif);

struct MembraneSample {
  double time;
  double v;
};

struct SimTrace {
  SpikeTrain output_spikes;
  SpikeTrain hidden_spikes;
  std::vector<MembraneSample> v_mem_output;
  std::size_t decimation = 1;
  double peak_v_output = 0.0;
  std::size_t n_steps = 0;
};

struct SimOptions {
  // Record every k-th step of the output membrane (0 disables the trace).
  std::size_t decimation = 10;
  // Input events before this time are dropped; the network rests until then.
  double gate_before = 0.0;
  bool record_hidden = true;
};

// Fixed-step simulation. Input events in [k dt, (k + 1) dt) are delivered in
// step k; hidden spikes reach the output in the same step. Spikes are stamped
// with the step's end time (k + 1) dt.
SimTrace simulate(const BsnnNetwork& net, const SpikeTrain& input, double duration,
                  const SimOptions& opts = {});

std::size_t step_count(double duration, double dt);

// Grid over output weight and global time constant. w_ho bounds are fractions
// of (v_thr - v_rest).
struct TuneGrid {
  double w_ho_min_rel = 0.01;
  double w_ho_max_rel = 10.0;
  std::size_t n_w_ho = 24;
  double tau_min = 1e-3;
  double tau_max = 1.0;
  std::size_t n_tau = 16;

  std::vector<double> w_ho_values(const LifParams& p) const;
  std::vector<double> tau_values() const;
};

struct TuneResult {
  double w_ho = 0.0;
  double tau_c = 0.0;
  double peak_v = 0.0;
  // v_thr - peak_v of the selected point.
  double margin = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t n_silent = 0;
};

struct TuneOptions {
  // Input before this time is dropped (calibration transient).
  double gate_before = 0.0;
  // Fraction of (v_thr - v_rest) the selected peak must stay below. Zero
  // admits any point whose output stays silent.
  double headroom = 0.0;
};

// Picks the grid point with the highest output peak membrane potential among
// those whose output never fires (and respects the headroom). Ties go to
// smaller w_ho, then smaller tau_c. Throws TuningError when no point qualifies.
TuneResult tune(const BsnnNetwork& net_template, const SpikeTrain& calib_input, double duration,
                const TuneGrid& grid, const TuneOptions& opts = {});

TuneResult tune_explicit(const BsnnNetwork& net_template, const SpikeTrain& calib_input,
                         double duration, const std::vector<double>& w_ho_values,
                         const std::vector<double>& tau_values, const TuneOptions& opts = {});

// For every channel and every consecutive window of `interval`, replace the
// window's UP events with a homogeneous Poisson train of the measured rate.
SpikeTrain regenerate_poisson(const SpikeTrain& input, double interval, std::uint64_t seed);

}  // namespace spikevib::snn
