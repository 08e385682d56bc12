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

#include "spikevib/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "spikevib/cochlea.hpp"
#include "spikevib/error.hpp"

namespace spikevib::bench {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const DetectionReport& r) {
  return json{{"run_id", r.run_id},
              {"label", r.label},
              {"verdict", r.verdict ? json(to_string(*r.verdict)) : json(nullptr)},
              {"first_spike_t_s", opt(r.first_spike_t)},
              {"detection_datapoint", opt(r.detection_datapoint)},
              {"latency_s", opt(r.latency)},
              {"early_alarm", r.early_alarm},
              {"config_hash", r.config_hash}};
}

json tune_json(const snn::TuneResult& t) {
  return json{{"w_ho", t.w_ho},
              {"tau_c_s", t.tau_c},
              {"peak_v", t.peak_v},
              {"margin", t.margin},
              {"n_evaluated", t.n_evaluated},
              {"n_silent", t.n_silent}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

encoder::EncodeResult encode_stream(const TimeSeries& x, const PipelineConfig& cfg,
                                    bool diagnostics, double t_stop) {
  validate(cfg);
  if (x.empty()) throw InputError("encode: empty input");
  const double fs = x.sample_rate();
  std::size_t n = x.size();
  if (std::isfinite(t_stop)) {
    n = std::min(n, static_cast<std::size_t>(std::llround(std::max(0.0, t_stop) * fs)));
  }
  const double duration = static_cast<double>(n) / fs;
  if (cfg.calib.t_adapt > duration) {
    throw InputError("encode: t_adapt " + std::to_string(cfg.calib.t_adapt) +
                     " s exceeds signal duration " + std::to_string(duration) + " s");
  }
  cochlea::Filterbank bank(cfg.filterbank, fs);
  encoder::AdmEncoder enc(bank.n_channels(), fs, cfg.adm, cfg.calib, 0.01, diagnostics);
  std::vector<std::vector<double>> chunk(bank.n_channels());
  const auto samples = x.samples();
  for (std::size_t i = 0; i < n; i += cfg.chunk_samples) {
    const std::size_t len = std::min(cfg.chunk_samples, n - i);
    for (auto& c : chunk) c.clear();
    bank.process_chunk(samples.subspan(i, len), chunk);
    enc.process_chunk(chunk);
  }
  return enc.finish(duration);
}

SpikeTrain snn_input(const SpikeTrain& up, const PipelineConfig& cfg) {
  if (!cfg.poisson_enabled) return up;
  return snn::regenerate_poisson(up, cfg.poisson_interval_s, cfg.seed);
}

snn::BsnnNetwork network_template(const PipelineConfig& cfg) {
  snn::BsnnConfig b = cfg.bsnn;
  b.n = cfg.filterbank.n_channels;
  return snn::build_bsnn(b, cfg.lif);
}

snn::TuneResult tune_on(const SpikeTrain& up, const PipelineConfig& cfg) {
  const double t_end = cfg.calib.t_adapt + cfg.tuning.window_s;
  if (up.duration() + 1e-9 < t_end) {
    throw InputError("tune: run of " + std::to_string(up.duration()) +
                     " s is shorter than calibration plus tuning window (" + std::to_string(t_end) + " s)");
  }
  snn::TuneOptions opts;
  opts.gate_before = cfg.calib.t_adapt;
  opts.headroom = cfg.tuning.headroom;
  std::vector<SpikeEvent> head;
  for (const auto& e : up.events()) {
    if (e.time >= t_end) break;
    head.push_back(e);
  }
  const SpikeTrain window(std::move(head), t_end);
  return snn::tune(network_template(cfg), snn_input(window, cfg), t_end, cfg.tuning.grid, opts);
}

snn::TuneResult tune_series(const TimeSeries& x, const PipelineConfig& cfg) {
  const double t_end = cfg.calib.t_adapt + cfg.tuning.window_s;
  return tune_on(encode_stream(x, cfg, false, t_end).up, cfg);
}

snn::BsnnNetwork tuned_network(const PipelineConfig& cfg, double w_ho, double tau_c) {
  return network_template(cfg).retuned(w_ho, tau_c);
}

std::optional<double> first_detection(const SpikeTrain& up, double duration,
                                      const PipelineConfig& cfg, const snn::TuneResult& tuned,
                                      snn::SimTrace* trace) {
  snn::SimOptions opts;
  opts.gate_before = cfg.calib.t_adapt;
  opts.decimation = trace ? 10 : 0;
  opts.record_hidden = trace != nullptr;
  const auto net = tuned_network(cfg, tuned.w_ho, tuned.tau_c);
  snn::SimTrace sim = snn::simulate(net, snn_input(up, cfg), duration, opts);
  std::optional<double> first;
  for (const auto& e : sim.output_spikes.events()) {
    if (e.time >= cfg.calib.t_adapt) {
      first = e.time;
      break;
    }
  }
  if (trace) *trace = std::move(sim);
  return first;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kTP: return "TP";
    case Verdict::kFP: return "FP";
    case Verdict::kTN: return "TN";
    case Verdict::kFN: break;
  }
  return "FN";
}

std::size_t detection_datapoint(double t, double recording_duration) {
  if (!(t >= 0.0) || !(recording_duration > 0.0)) {
    throw InputError("detection_datapoint: need t >= 0 and a positive recording duration");
  }
  double q = t / recording_duration;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) q = r;
  return static_cast<std::size_t>(std::floor(q)) + 1;
}

DetectionReport run_pipeline(const datasets::RunSpec& run, const PipelineConfig& cfg,
                             const snn::TuneResult& tuned) {
  const TimeSeries x = run.series();
  const auto enc = encode_stream(x, cfg);
  DetectionReport r;
  r.run_id = run.run_id;
  r.label = datasets::to_string(run.kind);
  r.config_hash = config_hash(cfg);
  r.first_spike_t = first_detection(enc.up, x.duration(), cfg, tuned);
  const double transition = run.transition_time.value_or(x.duration());
  if (r.first_spike_t) r.detection_datapoint = detection_datapoint(*r.first_spike_t, transition);
  if (run.kind == datasets::RunKind::kHealthyHealthy) {
    r.verdict = r.first_spike_t ? Verdict::kFP : Verdict::kTN;
  } else if (!r.first_spike_t) {
    r.verdict = Verdict::kFN;
  } else if (*r.first_spike_t < transition) {
    r.verdict = Verdict::kFP;
    r.early_alarm = true;
  } else {
    r.verdict = Verdict::kTP;
    r.latency = *r.first_spike_t - transition;
  }
  return r;
}

DetectionReport run_pipeline(const datasets::R2fStream& stream, const PipelineConfig& cfg,
                             const snn::TuneResult& tuned) {
  const auto enc = encode_stream(stream.series, cfg);
  DetectionReport r;
  r.run_id = "b" + std::to_string(stream.bearing_id);
  r.label = "run-to-failure";
  r.config_hash = config_hash(cfg);
  r.first_spike_t = first_detection(enc.up, stream.series.duration(), cfg, tuned);
  if (r.first_spike_t) {
    r.detection_datapoint = detection_datapoint(*r.first_spike_t, stream.recording_duration());
  }
  return r;
}

Confusion confusion_matrix(const std::vector<DetectionReport>& reports) {
  Confusion c;
  for (const auto& r : reports) {
    if (!r.verdict) continue;
    switch (*r.verdict) {
      case Verdict::kTP: ++c.tp; break;
      case Verdict::kFP: ++c.fp; break;
      case Verdict::kTN: ++c.tn; break;
      case Verdict::kFN: ++c.fn; break;
    }
  }
  return c;
}

ReferenceRow reference_row(std::size_t bearing) {
  static constexpr std::size_t kOurs[] = {543, 890, 873, 683};
  static constexpr std::size_t kLssvm[] = {533, 823, 893, 700};
  if (bearing < 1 || bearing > 4) throw InputError("reference_row: bearing must be 1..4");
  ReferenceRow row;
  row.bearing = bearing;
  row.reference = kOurs[bearing - 1];
  row.lssvm = kLssvm[bearing - 1];
  if (bearing == 1) row.aec = 547;
  return row;
}

std::vector<ReferenceRow> compare_table1(const std::vector<DetectionReport>& reports) {
  std::vector<ReferenceRow> rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    ReferenceRow row = reference_row(i + 1);
    row.detected = reports[i].detection_datapoint;
    if (row.detected) {
      row.delta = static_cast<long>(*row.detected) - static_cast<long>(row.reference);
    }
    rows.push_back(row);
  }
  return rows;
}

LatencyStats latency_stats(const std::vector<DetectionReport>& reports) {
  std::vector<double> v;
  for (const auto& r : reports) {
    if (r.latency) v.push_back(*r.latency);
  }
  LatencyStats s;
  s.n = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

IbfResult bench_ibf(const std::vector<datasets::RunSpec>& runs, const PipelineConfig& cfg) {
  if (runs.empty()) throw InputError("bench ibf: no runs");
  if (cfg.datasets.ibf_tuning_run >= runs.size()) {
    throw InputError("bench ibf: tuning run index out of range");
  }
  IbfResult out;
  const auto& tuning = runs[cfg.datasets.ibf_tuning_run];
  out.tuning_run = tuning.run_id;
  out.tuned = tune_series(tuning.series(), cfg);
  for (const auto& run : runs) out.reports.push_back(run_pipeline(run, cfg, out.tuned));
  out.confusion = confusion_matrix(out.reports);
  out.latency = latency_stats(out.reports);
  return out;
}

R2fResult bench_r2f(const std::vector<datasets::R2fStream>& streams, const PipelineConfig& cfg) {
  if (streams.empty()) throw InputError("bench r2f: no streams");
  R2fResult out;
  std::vector<encoder::EncodeResult> encoded;
  for (const auto& s : streams) encoded.push_back(encode_stream(s.series, cfg));
  const std::size_t shared = cfg.datasets.r2f_tuning_bearing - 1;
  if (shared >= streams.size()) throw InputError("bench r2f: tuning bearing out of range");
  std::optional<snn::TuneResult> common;
  if (!cfg.datasets.r2f_tune_per_bearing) common = tune_on(encoded[shared].up, cfg);
  const std::string hash = config_hash(cfg);
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const snn::TuneResult t = common ? *common : tune_on(encoded[i].up, cfg);
    out.tuned.push_back(t);
    DetectionReport r;
    r.run_id = "b" + std::to_string(streams[i].bearing_id);
    r.label = "run-to-failure";
    r.config_hash = hash;
    r.first_spike_t = first_detection(encoded[i].up, streams[i].series.duration(), cfg, t);
    if (r.first_spike_t) {
      r.detection_datapoint =
          detection_datapoint(*r.first_spike_t, streams[i].recording_duration());
    }
    out.reports.push_back(std::move(r));
  }
  out.rows = compare_table1(out.reports);
  return out;
}

std::string to_json(const DetectionReport& r) { return dump(report_json(r)); }

std::string to_json(const IbfResult& r) {
  json runs = json::array();
  for (const auto& rep : r.reports) runs.push_back(report_json(rep));
  const std::string hash = r.reports.empty() ? std::string() : r.reports.front().config_hash;
  return dump(json{{"config_hash", hash},
                   {"tuning_run", r.tuning_run},
                   {"tuned", tune_json(r.tuned)},
                   {"confusion", {{"TP", r.confusion.tp}, {"FP", r.confusion.fp},
                                  {"TN", r.confusion.tn}, {"FN", r.confusion.fn}}},
                   {"latency_s", {{"n", r.latency.n}, {"mean", r.latency.mean},
                                  {"std", r.latency.std}, {"reference_mean", 0.17},
                                  {"reference_std", 0.08}}},
                   {"runs", runs}});
}

std::string to_json(const R2fResult& r, const std::string& config_hash) {
  json reps = json::array();
  for (const auto& rep : r.reports) reps.push_back(report_json(rep));
  json tuned = json::array();
  for (const auto& t : r.tuned) tuned.push_back(tune_json(t));
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"bearing", row.bearing},
                    {"detected", opt(row.detected)},
                    {"reference", row.reference},
                    {"lssvm", row.lssvm},
                    {"aec", opt(row.aec)},
                    {"delta", row.delta ? json(*row.delta) : json(nullptr)}});
  }
  return dump(json{{"config_hash", config_hash}, {"tuned", tuned}, {"runs", reps}, {"rows", rows}});
}

std::string to_json(const snn::TuneResult& r, const std::string& config_hash) {
  json j = tune_json(r);
  j["config_hash"] = config_hash;
  return dump(j);
}

snn::TuneResult parse_tuned_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("w_ho") || !j.contains("tau_c_s") ||
      !j["w_ho"].is_number() || !j["tau_c_s"].is_number()) {
    throw InputError(source + ": expected numeric w_ho and tau_c_s");
  }
  snn::TuneResult t;
  t.w_ho = j["w_ho"].get<double>();
  t.tau_c = j["tau_c_s"].get<double>();
  if (j.contains("peak_v") && j["peak_v"].is_number()) t.peak_v = j["peak_v"].get<double>();
  if (j.contains("margin") && j["margin"].is_number()) t.margin = j["margin"].get<double>();
  if (!(t.w_ho > 0.0) || !(t.tau_c > 0.0)) throw InputError(source + ": w_ho and tau_c_s must be positive");
  return t;
}

std::string to_csv(const std::vector<ReferenceRow>& rows, const std::string& config_hash) {
  auto s = [](const auto& o) { return o ? std::to_string(*o) : std::string("none"); };
  std::string out = "# config_hash=" + config_hash + "\n";
  out += "bearing,detected,reference,lssvm,aec,delta\n";
  for (const auto& r : rows) {
    out += std::to_string(r.bearing) + "," + s(r.detected) + "," + std::to_string(r.reference) + "," +
           std::to_string(r.lssvm) + "," + s(r.aec) + "," + s(r.delta) + "\n";
  }
  return out;
}

}  // namespace spikevib::bench
