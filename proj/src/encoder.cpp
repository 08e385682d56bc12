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

#include "spikevib/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikevib/error.hpp"

namespace spikevib::encoder {

void validate(const AdmConfig& cfg) {
  if (!(cfg.t_r >= 0.0)) throw InputError("adm: t_r must be >= 0");
  if (!(cfg.thr_floor > 0.0)) throw InputError("adm: thr_floor must be > 0");
  if (cfg.v_thr_init > 0.0 && cfg.v_thr_init < cfg.thr_floor) {
    throw InputError("adm: v_thr_init must be >= thr_floor");
  }
  if (!(cfg.init_window_s > 0.0)) throw InputError("adm: init_window_s must be > 0");
}

void validate(const CalibConfig& cal) {
  if (!(cal.t_adapt > 0.0)) throw InputError("calibration: t_adapt must be > 0");
  if (!(cal.f_target > 0.0)) throw InputError("calibration: f_target must be > 0");
  if (!(cal.eta > 0.0)) throw InputError("calibration: eta must be > 0");
  if (!(cal.tau_avg > 1.0)) throw InputError("calibration: tau_avg must be > 1");
}

AdmChannelState make_state(std::uint32_t channel, double v_thr, double ref_level,
                           const AdmConfig& cfg, bool calibrating) {
  AdmChannelState s;
  s.channel = channel;
  s.v_thr_up = std::max(v_thr, cfg.thr_floor);
  s.v_thr_dn = s.v_thr_up;
  s.ref_level = ref_level;
  s.calibrating = calibrating;
  return s;
}

StepSpikes encode_step(AdmChannelState& state, double sample, double t, const AdmConfig& cfg,
                       std::vector<SpikeEvent>* out) {
  if (!(t > state.last_t)) {
    throw ContractError("encode_step: time " + std::to_string(t) +
                        " does not advance past " + std::to_string(state.last_t));
  }
  state.last_t = t;
  StepSpikes n;
  while (sample - state.ref_level >= state.v_thr_up && t - state.last_spike_t_up >= cfg.t_r) {
    state.ref_level += state.v_thr_up;
    state.last_spike_t_up = t;
    ++n.up;
    if (out) out->push_back({t, state.channel, Polarity::kUp});
  }
  while (state.ref_level - sample >= state.v_thr_dn && t - state.last_spike_t_dn >= cfg.t_r) {
    state.ref_level -= state.v_thr_dn;
    state.last_spike_t_dn = t;
    ++n.down;
    if (out) out->push_back({t, state.channel, Polarity::kDown});
  }
  return n;
}

CalibrationGains CalibrationGains::from(const CalibConfig& cal, double sample_rate,
                                        double v_thr_init, double thr_floor) {
  CalibrationGains g;
  g.a_target = cal.f_target / sample_rate;
  g.eta = cal.eta * v_thr_init;
  g.tau_avg = cal.tau_avg;
  g.thr_floor = thr_floor;
  return g;
}

double threshold_update(double v_thr, double activity, const CalibrationGains& g) {
  return std::max(g.thr_floor, v_thr + g.eta * (activity - g.a_target));
}

void calibrate_step(AdmChannelState& state, bool spiked_up, bool spiked_dn,
                    const CalibrationGains& g) {
  const double s_up = spiked_up ? 1.0 : 0.0;
  const double s_dn = spiked_dn ? 1.0 : 0.0;
  state.a_up += (s_up - state.a_up) / g.tau_avg;
  state.a_dn += (s_dn - state.a_dn) / g.tau_avg;
  state.v_thr_up = threshold_update(state.v_thr_up, state.a_up, g);
  state.v_thr_dn = threshold_update(state.v_thr_dn, state.a_dn, g);
}

AdmEncoder::AdmEncoder(std::size_t n_channels, double sample_rate, const AdmConfig& cfg,
                       const CalibConfig& cal, double trace_interval_s, bool keep_diagnostics)
    : cfg_(cfg),
      cal_(cal),
      sample_rate_(sample_rate),
      keep_diagnostics_(keep_diagnostics),
      pending_(n_channels),
      states_(n_channels) {
  validate(cfg_);
  validate(cal_);
  if (n_channels == 0) throw InputError("adm: need at least one channel");
  if (!(sample_rate > 0.0)) throw InputError("adm: sample rate must be positive");
  n_adapt_ = static_cast<std::size_t>(std::llround(cal_.t_adapt * sample_rate_));
  n_init_ = cfg_.v_thr_init > 0.0
                ? 1
                : std::max<std::size_t>(
                      1, static_cast<std::size_t>(std::llround(cfg_.init_window_s * sample_rate_)));
  trace_every_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(trace_interval_s * sample_rate_)));
}

void AdmEncoder::start(std::span<const std::vector<double>> head) {
  const std::size_t n = std::min(n_init_, head.front().size());
  gains_.resize(states_.size());
  v_thr_init_.resize(states_.size());
  for (std::size_t c = 0; c < states_.size(); ++c) {
    double v0 = cfg_.v_thr_init;
    if (v0 <= 0.0) {
      double mean = 0.0;
      const auto window = std::span<const double>(head[c]).first(n);
      for (double v : window) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : window) var += (v - mean) * (v - mean);
      v0 = std::sqrt(var / static_cast<double>(n));
    }
    v0 = std::max(v0, cfg_.thr_floor);
    v_thr_init_[c] = v0;
    states_[c] = make_state(static_cast<std::uint32_t>(c), v0, head[c].front(), cfg_, n_adapt_ > 0);
    gains_[c] = CalibrationGains::from(cal_, sample_rate_, v0, cfg_.thr_floor);
  }
  started_ = true;
}

void AdmEncoder::run(std::size_t c, std::span<const double> x, std::size_t first_index) {
  auto& st = states_[c];
  const auto& g = gains_[c];
  std::vector<SpikeEvent> scratch;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::size_t i = first_index + k;
    const double t = static_cast<double>(i) / sample_rate_;
    scratch.clear();
    const StepSpikes s = encode_step(st, x[k], t, cfg_, &scratch);
    for (const auto& e : scratch) {
      if (e.polarity == Polarity::kUp) {
        up_.push_back(e);
      } else if (keep_diagnostics_) {
        down_.push_back(e);
      }
    }
    if (i < n_adapt_) {
      calibrate_step(st, s.up > 0, s.down > 0, g);
      if (keep_diagnostics_ && (i % trace_every_ == 0 || i + 1 == n_adapt_)) {
        rows_.push_back({t, st.channel, st.v_thr_up, st.v_thr_dn, st.a_up, st.a_dn});
      }
      st.calibrating = i + 1 < n_adapt_;
    }
  }
}

void AdmEncoder::process_chunk(std::span<const std::vector<double>> chunk) {
  if (chunk.size() != states_.size()) {
    throw InputError("adm: expected " + std::to_string(states_.size()) + " channels, got " +
                     std::to_string(chunk.size()));
  }
  const std::size_t n = chunk.front().size();
  for (const auto& ch : chunk) {
    if (ch.size() != n) throw InputError("adm: chunk channels differ in length");
  }
  if (n == 0) return;

  if (!started_) {
    for (std::size_t c = 0; c < chunk.size(); ++c) {
      pending_[c].insert(pending_[c].end(), chunk[c].begin(), chunk[c].end());
    }
    if (pending_.front().size() < n_init_) return;
    start(pending_);
    for (std::size_t c = 0; c < pending_.size(); ++c) run(c, pending_[c], 0);
    consumed_ = pending_.front().size();
    pending_.assign(pending_.size(), {});
    return;
  }
  for (std::size_t c = 0; c < chunk.size(); ++c) run(c, chunk[c], consumed_);
  consumed_ += n;
}

EncodeResult AdmEncoder::finish(double duration) {
  if (!started_ && !pending_.front().empty()) {
    start(pending_);
    for (std::size_t c = 0; c < pending_.size(); ++c) run(c, pending_[c], 0);
    consumed_ = pending_.front().size();
    pending_.assign(pending_.size(), {});
  }
  EncodeResult r;
  r.up = SpikeTrain(std::move(up_), duration);
  r.trace.down = SpikeTrain(std::move(down_), duration);
  r.trace.rows = std::move(rows_);
  std::stable_sort(r.trace.rows.begin(), r.trace.rows.end(),
                   [](const TraceRow& a, const TraceRow& b) {
                     return a.time != b.time ? a.time < b.time : a.channel < b.channel;
                   });
  for (const auto& s : states_) {
    r.trace.v_thr_up.push_back(s.v_thr_up);
    r.trace.v_thr_dn.push_back(s.v_thr_dn);
  }
  r.trace.v_thr_init = v_thr_init_;
  up_.clear();
  down_.clear();
  rows_.clear();
  return r;
}

EncodeResult encode(const MultiChannelSeries& x, const AdmConfig& cfg, const CalibConfig& cal,
                    double trace_interval_s) {
  if (x.n_channels() == 0 || x.length() == 0) throw InputError("encode: empty input");
  if (cal.t_adapt > x.duration()) {
    throw InputError("encode: t_adapt " + std::to_string(cal.t_adapt) + " s exceeds duration " +
                     std::to_string(x.duration()) + " s");
  }
  AdmEncoder enc(x.n_channels(), x.sample_rate(), cfg, cal, trace_interval_s);
  std::vector<std::vector<double>> chunk(x.n_channels());
  for (std::size_t c = 0; c < x.n_channels(); ++c) {
    chunk[c].assign(x.channel(c).begin(), x.channel(c).end());
  }
  enc.process_chunk(chunk);
  return enc.finish(x.duration());
}

}  // namespace spikevib::encoder
