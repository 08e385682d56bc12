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

#include "spikevib/snn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "spikevib/error.hpp"

namespace spikevib::snn {

namespace {

struct Decay {
  double v_rest;
  double factor;
};

Decay make_decay(const LifParams& p, double dt) { return {p.v_rest, std::exp(-dt / p.tau_c())}; }

inline void integrate(LifState& s, const Decay& d, double impulse) {
  s.v_mem = d.v_rest + (s.v_mem - d.v_rest) * d.factor;
  s.v_mem += impulse;
}

inline bool fire(LifState& s, const LifParams& p, double t_end) {
  if (s.v_mem >= p.v_thr && t_end >= s.refractory_until) {
    s.v_mem = p.v_reset;
    s.refractory_until = t_end + p.t_ref;
    return true;
  }
  return false;
}

// Per-step per-channel event counts, flattened as step * n + channel. Only
// steps with at least one event are stored.
struct BinnedInput {
  std::vector<std::size_t> steps;
  std::vector<std::uint32_t> counts;
};

BinnedInput bin_input(const SpikeTrain& input, std::size_t n, double dt, std::size_t n_steps,
                      double gate_before) {
  BinnedInput b;
  for (const auto& e : input.events()) {
    if (e.polarity != Polarity::kUp) continue;
    if (e.channel >= n) {
      throw InputError("simulate: input channel " + std::to_string(e.channel) +
                       " >= network size " + std::to_string(n));
    }
    if (e.time < gate_before) continue;
    auto k = static_cast<std::size_t>(std::floor(e.time / dt));
    // Events exactly at the end of the run belong to the last step.
    if (k >= n_steps) {
      if (n_steps == 0) continue;
      k = n_steps - 1;
    }
    if (b.steps.empty() || b.steps.back() != k) {
      b.steps.push_back(k);
      b.counts.resize(b.counts.size() + n, 0);
    }
    ++b.counts[b.counts.size() - n + e.channel];
  }
  return b;
}

struct HiddenRun {
  // Number of hidden spikes per step (dense).
  std::vector<std::uint32_t> spikes_per_step;
  std::vector<SpikeEvent> hidden_events;
};

double step_end_time(std::size_t k, double dt) { return static_cast<double>(k + 1) * dt; }

HiddenRun run_hidden(const BsnnNetwork& net, const BinnedInput& in, std::size_t n_steps,
                     bool record) {
  const std::size_t n = net.n();
  const double dt = net.config().dt;
  const LifParams& p = net.hidden_params();
  const Decay d = make_decay(p, dt);
  std::vector<LifState> hidden(n, rest_state(p));
  HiddenRun out;
  out.spikes_per_step.assign(n_steps, 0);
  std::size_t next = 0;
  const std::vector<std::uint32_t> zero(n, 0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const std::uint32_t* counts = zero.data();
    if (next < in.steps.size() && in.steps[next] == k) {
      counts = &in.counts[next * n];
      ++next;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += static_cast<double>(counts[j]);
    const double t_end = step_end_time(k, dt);
    std::uint32_t fired = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double own = static_cast<double>(counts[j]);
      const double impulse = net.w_exc() * own - net.w_inh() * (total - own);
      integrate(hidden[j], d, impulse);
      if (fire(hidden[j], p, t_end)) {
        ++fired;
        if (record) out.hidden_events.push_back({t_end, static_cast<std::uint32_t>(j), Polarity::kUp});
      }
    }
    out.spikes_per_step[k] = fired;
  }
  return out;
}

struct OutputRun {
  std::vector<SpikeEvent> spikes;
  std::vector<MembraneSample> trace;
  double peak = 0.0;
};

OutputRun run_output(const BsnnNetwork& net, const std::vector<std::uint32_t>& hidden_spikes,
                     std::size_t decimation, bool stop_at_first_spike) {
  const double dt = net.config().dt;
  const LifParams& p = net.output_params();
  const Decay d = make_decay(p, dt);
  LifState out = rest_state(p);
  OutputRun r;
  r.peak = out.v_mem;
  if (decimation > 0) r.trace.push_back({0.0, out.v_mem});
  for (std::size_t k = 0; k < hidden_spikes.size(); ++k) {
    integrate(out, d, net.w_ho() * static_cast<double>(hidden_spikes[k]));
    r.peak = std::max(r.peak, out.v_mem);
    const double t_end = step_end_time(k, dt);
    if (fire(out, p, t_end)) {
      r.spikes.push_back({t_end, 0, Polarity::kUp});
      if (stop_at_first_spike) break;
    }
    if (decimation > 0 && (k + 1) % decimation == 0) r.trace.push_back({t_end, out.v_mem});
  }
  return r;
}

}  // namespace

LifParams LifParams::with_tau_c(double tau) const {
  LifParams p = *this;
  p.c = tau / r;
  return p;
}

void validate(const LifParams& p) {
  if (!(p.r > 0.0) || !(p.c > 0.0)) throw InputError("lif: r and c must be positive");
  if (!(p.v_thr > p.v_reset)) throw InputError("lif: v_thr must exceed v_reset");
  if (!(p.t_ref >= 0.0)) throw InputError("lif: t_ref must be >= 0");
}

bool lif_step(LifState& state, const LifParams& p, double impulse, double dt, double t_end) {
  if (!(dt > 0.0)) throw ContractError("lif_step: dt must be positive");
  integrate(state, make_decay(p, dt), impulse);
  return fire(state, p, t_end);
}

void validate(const BsnnConfig& cfg) {
  if (cfg.n < 2) throw InputError("bsnn: n must be >= 2 (balance undefined otherwise)");
  if (!(cfg.alpha > 0.0)) throw InputError("bsnn: alpha must be positive");
  if (!(cfg.w_inh > 0.0)) throw InputError("bsnn: w_inh must be positive");
  if (!(cfg.w_ho > 0.0)) throw InputError("bsnn: w_ho must be positive");
  if (!(cfg.dt > 0.0)) throw InputError("bsnn: dt must be positive");
}

BsnnNetwork::BsnnNetwork(const BsnnConfig& cfg, const LifParams& lif)
    : cfg_(cfg), hidden_(lif), output_(lif), w_exc_(0.0) {
  validate(cfg_);
  validate(lif);
  w_exc_ = cfg_.w_exc();
}

std::vector<Synapse> BsnnNetwork::synapses() const {
  std::vector<Synapse> s;
  const auto n = static_cast<std::uint32_t>(cfg_.n);
  s.reserve(cfg_.n * cfg_.n + cfg_.n);
  for (std::uint32_t j = 0; j < n; ++j) {
    for (std::uint32_t k = 0; k < n; ++k) {
      s.push_back({Synapse::Kind::kInputHidden, k, j, k == j ? w_exc_ : -cfg_.w_inh});
    }
  }
  for (std::uint32_t j = 0; j < n; ++j) {
    s.push_back({Synapse::Kind::kHiddenOutput, j, 0, cfg_.w_ho});
  }
  return s;
}

BsnnNetwork BsnnNetwork::retuned(double w_ho, double tau_c) const {
  BsnnConfig cfg = cfg_;
  cfg.w_ho = w_ho;
  return BsnnNetwork(cfg, hidden_.with_tau_c(tau_c));
}

BsnnNetwork build_bsnn(const BsnnConfig& cfg, const LifParams& lif) { return BsnnNetwork(cfg, lif); }

std::size_t step_count(double duration, double dt) {
  if (!(duration >= 0.0)) throw InputError("simulate: duration must be >= 0");
  const double ratio = duration / dt;
  const double nearest = std::round(ratio);
  // Absorb representation error so that e.g. 3.0 / 1e-4 gives 30000 steps.
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

SimTrace simulate(const BsnnNetwork& net, const SpikeTrain& input, double duration,
                  const SimOptions& opts) {
  const double dt = net.config().dt;
  const std::size_t n_steps = step_count(duration, dt);
  const BinnedInput binned = bin_input(input, net.n(), dt, n_steps, opts.gate_before);
  HiddenRun hidden = run_hidden(net, binned, n_steps, opts.record_hidden);
  OutputRun out = run_output(net, hidden.spikes_per_step, opts.decimation, false);

  const double t_total = static_cast<double>(n_steps) * dt;
  SimTrace trace;
  trace.output_spikes = SpikeTrain(std::move(out.spikes), t_total);
  trace.hidden_spikes = SpikeTrain(std::move(hidden.hidden_events), t_total);
  trace.v_mem_output = std::move(out.trace);
  trace.decimation = opts.decimation;
  trace.peak_v_output = out.peak;
  trace.n_steps = n_steps;
  return trace;
}

std::vector<double> TuneGrid::w_ho_values(const LifParams& p) const {
  const double scale = p.v_thr - p.v_rest;
  std::vector<double> out;
  if (n_w_ho == 0) return out;
  if (n_w_ho == 1) return {w_ho_min_rel * scale};
  for (std::size_t i = 0; i < n_w_ho; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_w_ho - 1);
    out.push_back(scale * w_ho_min_rel * std::pow(w_ho_max_rel / w_ho_min_rel, f));
  }
  return out;
}

std::vector<double> TuneGrid::tau_values() const {
  std::vector<double> out;
  if (n_tau == 0) return out;
  if (n_tau == 1) return {tau_min};
  for (std::size_t i = 0; i < n_tau; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_tau - 1);
    out.push_back(tau_min * std::pow(tau_max / tau_min, f));
  }
  return out;
}

TuneResult tune(const BsnnNetwork& net_template, const SpikeTrain& calib_input, double duration,
                const TuneGrid& grid, const TuneOptions& opts) {
  if (!(grid.w_ho_min_rel > 0.0) || !(grid.w_ho_max_rel >= grid.w_ho_min_rel) ||
      !(grid.tau_min > 0.0) || !(grid.tau_max >= grid.tau_min)) {
    throw InputError("tune: invalid grid bounds");
  }
  return tune_explicit(net_template, calib_input, duration,
                       grid.w_ho_values(net_template.output_params()), grid.tau_values(),
                       opts);
}

TuneResult tune_explicit(const BsnnNetwork& net_template, const SpikeTrain& calib_input,
                         double duration, const std::vector<double>& w_ho_values,
                         const std::vector<double>& tau_values, const TuneOptions& opts) {
  if (w_ho_values.empty() || tau_values.empty()) throw InputError("tune: empty grid");
  if (!(opts.headroom >= 0.0) || !(opts.headroom < 1.0)) {
    throw InputError("tune: headroom must lie in [0, 1)");
  }
  const LifParams& out_params = net_template.output_params();
  const double ceiling = out_params.v_thr - opts.headroom * (out_params.v_thr - out_params.v_rest);
  const double dt = net_template.config().dt;
  const std::size_t n_steps = step_count(duration, dt);
  const BinnedInput binned = bin_input(calib_input, net_template.n(), dt, n_steps, opts.gate_before);

  std::vector<double> ws = w_ho_values;
  std::vector<double> taus = tau_values;
  std::sort(ws.begin(), ws.end());
  std::sort(taus.begin(), taus.end());

  TuneResult best;
  bool found = false;
  // Iterating w_ho then tau_c in ascending order and replacing only on a
  // strictly higher peak implements the tie-break.
  std::vector<HiddenRun> hidden_by_tau;
  hidden_by_tau.reserve(taus.size());
  for (double tau : taus) {
    hidden_by_tau.push_back(run_hidden(net_template.retuned(ws.front(), tau), binned, n_steps, false));
  }
  for (double w : ws) {
    for (std::size_t t = 0; t < taus.size(); ++t) {
      const BsnnNetwork net = net_template.retuned(w, taus[t]);
      const OutputRun out = run_output(net, hidden_by_tau[t].spikes_per_step, 0, true);
      ++best.n_evaluated;
      if (!out.spikes.empty()) continue;
      ++best.n_silent;
      if (opts.headroom > 0.0 && out.peak > ceiling) continue;
      if (!found || out.peak > best.peak_v) {
        found = true;
        best.w_ho = w;
        best.tau_c = taus[t];
        best.peak_v = out.peak;
      }
    }
  }
  if (!found) {
    throw TuningError(best.n_silent == 0
                          ? "tune: every grid point makes the output neuron fire; widen the grid"
                          : "tune: no silent grid point stays within the requested headroom");
  }
  best.margin = net_template.output_params().v_thr - best.peak_v;
  return best;
}

SpikeTrain regenerate_poisson(const SpikeTrain& input, double interval, std::uint64_t seed) {
  if (!(interval > 0.0)) throw InputError("regenerate_poisson: interval must be positive");
  const double duration = input.duration();
  const std::size_t n_channels = input.channel_span();
  if (input.empty() || duration <= 0.0) return SpikeTrain({}, duration);

  const auto n_windows = static_cast<std::size_t>(std::ceil(duration / interval));
  std::vector<std::uint64_t> counts(n_channels * n_windows, 0);
  for (const auto& e : input.events()) {
    if (e.polarity != Polarity::kUp) continue;
    const auto w = std::min(n_windows - 1, static_cast<std::size_t>(e.time / interval));
    ++counts[e.channel * n_windows + w];
  }

  std::vector<SpikeEvent> out;
  for (std::size_t c = 0; c < n_channels; ++c) {
    for (std::size_t w = 0; w < n_windows; ++w) {
      const std::uint64_t n_in = counts[c * n_windows + w];
      if (n_in == 0) continue;
      const double start = static_cast<double>(w) * interval;
      const double end = std::min(duration, start + interval);
      const double len = end - start;
      if (!(len > 0.0)) continue;
      // Each (channel, window) has its own stream so results do not depend
      // on iteration order.
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(w)};
      std::mt19937_64 rng(seq);
      const double rate = static_cast<double>(n_in) / len;
      std::poisson_distribution<std::uint64_t> count_dist(rate * len);
      std::uniform_real_distribution<double> when(start, end);
      const std::uint64_t n_out = count_dist(rng);
      for (std::uint64_t i = 0; i < n_out; ++i) {
        out.push_back({when(rng), static_cast<std::uint32_t>(c), Polarity::kUp});
      }
    }
  }
  return SpikeTrain(std::move(out), duration);
}

}  // namespace spikevib::snn
