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

// spikevib: command-line front end for the filterbank / ADM / BSNN pipeline.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikevib/bench.hpp"
#include "spikevib/cochlea.hpp"
#include "spikevib/config.hpp"
#include "spikevib/datasets.hpp"
#include "spikevib/encoder.hpp"
#include "spikevib/error.hpp"
#include "spikevib/snn.hpp"
#include "spikevib/synth.hpp"

namespace sv = spikevib;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> set;
};

sv::PipelineConfig resolve(const Common& c) {
  std::vector<std::string> overrides = c.set;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  return c.config.empty() ? sv::default_config(overrides) : sv::load_config(c.config, overrides);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Pipeline config (TOML)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Override the config seed");
  app->add_option("--set", c.set, "Override a config value, e.g. encoder.f_target_hz=100")
      ->take_all()
      ->allow_extra_args(false);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to `path`, or stdout when path is "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw sv::InputError("cannot write " + path);
    }
  }
  std::ostream& operator*() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// key=value pairs from leading "# key=value[, key=value]" comment lines.
std::map<std::string, std::string> header_fields(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sv::InputError("cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line) && !line.empty() && line.front() == '#') {
    std::stringstream ss(line.substr(1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
  }
  return out;
}

double number_field(const std::map<std::string, std::string>& h, const std::string& key,
                    const std::string& path) {
  const auto it = h.find(key);
  if (it == h.end()) throw sv::InputError(path + ": missing '# " + key + "=' header; pass it explicitly");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw sv::InputError(path + ": bad " + key + " header '" + it->second + "'");
  }
}

sv::TimeSeries read_signal(const std::string& path, std::optional<double> rate) {
  const double fs = rate ? *rate : number_field(header_fields(path), "sample_rate_hz", path);
  return sv::datasets::load_csv_recording(path, fs).series;
}

// Events CSV: time_s,channel,polarity with a duration_s header field.
sv::SpikeTrain read_events(const std::string& path, std::optional<double> duration) {
  const double d = duration ? *duration : number_field(header_fields(path), "duration_s", path);
  std::ifstream in(path);
  if (!in) throw sv::InputError("cannot open " + path);
  std::vector<sv::SpikeEvent> ev;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line.front() == '#') continue;
    std::stringstream ss(line);
    std::string t, c, p;
    if (!std::getline(ss, t, ',') || !std::getline(ss, c, ',') || !std::getline(ss, p)) {
      throw sv::ParseError(path, no, "expected time_s,channel,polarity");
    }
    if (!p.empty() && p.back() == '\r') p.pop_back();
    sv::SpikeEvent e;
    try {
      std::size_t used = 0;
      e.time = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      const long ch = std::stol(c, &used);
      if (used != c.size() || ch < 0) throw std::invalid_argument(c);
      e.channel = static_cast<std::uint32_t>(ch);
    } catch (const std::exception&) {
      throw sv::ParseError(path, no, "bad event row");
    }
    if (p == "up") {
      e.polarity = sv::Polarity::kUp;
    } else if (p == "down") {
      e.polarity = sv::Polarity::kDown;
    } else {
      throw sv::ParseError(path, no, "polarity must be up or down");
    }
    ev.push_back(e);
  }
  return sv::SpikeTrain(std::move(ev), d);
}

void write_events(std::ostream& o, const sv::SpikeTrain& train, const std::string& hash) {
  o << "# config_hash=" << hash << ", duration_s=" << fmt(train.duration())
    << ", columns=time_s;channel;polarity\n";
  for (const auto& e : train.events()) {
    o << fmt(e.time) << ',' << e.channel << ',' << (e.polarity == sv::Polarity::kUp ? "up" : "down")
      << '\n';
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sv::InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- subcommands -----------------------------------------------------------

struct FilterbankArgs {
  Common common;
  bool inspect = false;
  double sample_rate = 0.0;
  std::string out = "-";
};

int run_filterbank(const FilterbankArgs& a) {
  if (!a.inspect) throw sv::InputError("filterbank: nothing to do (use --inspect)");
  const auto cfg = resolve(a.common);
  const sv::cochlea::Filterbank bank(cfg.filterbank, a.sample_rate);
  Output out(a.out);
  auto& o = *out;
  o << "# config_hash=" << sv::config_hash(cfg) << ", sample_rate_hz=" << fmt(a.sample_rate) << "\n";
  o << "channel,f_c_hz,bandwidth_hz";
  for (int s = 0; s < sv::cochlea::kGammatoneOrder; ++s) {
    for (const char* k : {"b0", "b1", "b2", "a1", "a2"}) o << ",s" << s << "_" << k;
  }
  o << ",gain_at_f_c,peak_gain,peak_f_hz\n";
  for (std::size_t c = 0; c < bank.n_channels(); ++c) {
    const auto& ch = bank.channels()[c];
    // Dense log-frequency sweep around f_c for the measured peak.
    double peak = 0.0;
    double peak_f = ch.f_c;
    const int n = 4000;
    const double lo = ch.f_c / 4.0;
    const double hi = std::min(4.0 * ch.f_c, 0.499 * a.sample_rate);
    for (int i = 0; i <= n; ++i) {
      const double f = lo * std::pow(hi / lo, static_cast<double>(i) / n);
      const double m = ch.magnitude(f);
      if (m > peak) {
        peak = m;
        peak_f = f;
      }
    }
    o << c << ',' << fmt(ch.f_c) << ',' << fmt(ch.bandwidth);
    for (const auto& s : ch.sections) {
      o << ',' << fmt(s.b0) << ',' << fmt(s.b1) << ',' << fmt(s.b2) << ',' << fmt(s.a1) << ','
        << fmt(s.a2);
    }
    o << ',' << fmt(ch.magnitude(ch.f_c)) << ',' << fmt(peak) << ',' << fmt(peak_f) << '\n';
  }
  return 0;
}

struct EncodeArgs {
  Common common;
  std::string input;
  std::optional<double> sample_rate;
  std::string events = "-";
  std::string trace;
};

int run_encode(const EncodeArgs& a) {
  const auto cfg = resolve(a.common);
  const auto x = read_signal(a.input, a.sample_rate);
  const auto enc = sv::bench::encode_stream(x, cfg, true);
  const std::string hash = sv::config_hash(cfg);
  std::vector<sv::SpikeEvent> all(enc.up.events().begin(), enc.up.events().end());
  all.insert(all.end(), enc.trace.down.events().begin(), enc.trace.down.events().end());
  {
    Output out(a.events);
    write_events(*out, sv::SpikeTrain(std::move(all), enc.up.duration()), hash);
  }
  if (!a.trace.empty()) {
    Output out(a.trace);
    auto& o = *out;
    o << "# config_hash=" << hash << ", columns=time_s;channel;v_thr_up;v_thr_dn;a_up;a_dn\n";
    for (const auto& r : enc.trace.rows) {
      o << fmt(r.time) << ',' << r.channel << ',' << fmt(r.v_thr_up) << ',' << fmt(r.v_thr_dn)
        << ',' << fmt(r.a_up) << ',' << fmt(r.a_dn) << '\n';
    }
  }
  return 0;
}

struct TuneArgs {
  Common common;
  std::string events;
  std::string input;
  std::optional<double> sample_rate;
  std::string out = "-";
};

int run_tune(const TuneArgs& a) {
  const auto cfg = resolve(a.common);
  if (a.events.empty() == a.input.empty()) {
    throw sv::InputError("tune: give exactly one of --events or --input");
  }
  const sv::snn::TuneResult t = a.events.empty()
                                    ? sv::bench::tune_series(read_signal(a.input, a.sample_rate), cfg)
                                    : sv::bench::tune_on(read_events(a.events, std::nullopt), cfg);
  Output out(a.out);
  *out << sv::bench::to_json(t, sv::config_hash(cfg));
  return 0;
}

struct SimulateArgs {
  Common common;
  std::string events;
  std::optional<double> duration;
  std::string tuned;
  std::string out = "-";
  std::string spikes;
  std::size_t decimation = 10;
};

int run_simulate(const SimulateArgs& a) {
  const auto cfg = resolve(a.common);
  const auto train = read_events(a.events, a.duration);
  sv::snn::TuneResult t;
  t.w_ho = cfg.bsnn.w_ho;
  t.tau_c = cfg.lif.tau_c();
  if (!a.tuned.empty()) t = sv::bench::parse_tuned_json(read_text(a.tuned), a.tuned);
  sv::snn::SimOptions opts;
  opts.gate_before = cfg.calib.t_adapt;
  opts.decimation = a.decimation;
  const auto net = sv::bench::tuned_network(cfg, t.w_ho, t.tau_c);
  const auto trace = sv::snn::simulate(net, sv::bench::snn_input(train, cfg), train.duration(), opts);
  const std::string hash = sv::config_hash(cfg);
  {
    Output out(a.out);
    auto& o = *out;
    o << "# config_hash=" << hash << ", decimation=" << trace.decimation << ", dt_s=" << fmt(cfg.bsnn.dt)
      << ", w_ho=" << fmt(t.w_ho) << ", tau_c_s=" << fmt(t.tau_c) << ", columns=time_s;v_mem\n";
    for (const auto& m : trace.v_mem_output) o << fmt(m.time) << ',' << fmt(m.v) << '\n';
  }
  if (!a.spikes.empty()) {
    Output out(a.spikes);
    auto& o = *out;
    o << "# config_hash=" << hash << ", columns=time_s;layer;neuron\n";
    for (const auto& e : trace.hidden_spikes.events()) o << fmt(e.time) << ",hidden," << e.channel << '\n';
    for (const auto& e : trace.output_spikes.events()) o << fmt(e.time) << ",output,0\n";
  }
  return 0;
}

struct BenchArgs {
  Common common;
  std::string manifest;
  std::string dir;
  std::string out = "-";
  std::string json;
};

int run_bench_ibf(const BenchArgs& a) {
  const auto cfg = resolve(a.common);
  const auto set = sv::datasets::load_ibf(a.manifest);
  const auto runs = sv::datasets::build_ibf_runs(set.healthy, set.defective);
  const auto result = sv::bench::bench_ibf(runs, cfg);
  Output out(a.out);
  *out << sv::bench::to_json(result);
  return 0;
}

int run_bench_r2f(const BenchArgs& a) {
  const auto cfg = resolve(a.common);
  const auto streams = sv::datasets::load_r2f_dir(a.dir, cfg.datasets.r2f_columns,
                                                  cfg.datasets.r2f_samples_per_file,
                                                  cfg.datasets.r2f_sample_rate_hz);
  const auto result = sv::bench::bench_r2f(streams, cfg);
  const std::string hash = sv::config_hash(cfg);
  {
    Output out(a.out);
    *out << sv::bench::to_csv(result.rows, hash);
  }
  if (!a.json.empty()) {
    Output out(a.json);
    *out << sv::bench::to_json(result, hash);
  }
  return 0;
}

struct SynthArgs {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
};

int run_synth(const SynthArgs& a) {
  auto spec = sv::load_synth_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  const auto x = sv::synth::synth(spec);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(sv::fnv1a64(sv::to_toml(spec))));
  Output out(a.out);
  auto& o = *out;
  o << "# config_hash=" << hash << ", sample_rate_hz=" << fmt(spec.sample_rate) << "\n";
  for (double v : x.samples()) o << fmt(v) << '\n';
  return 0;
}

struct VerifyArgs {
  Common common;
  std::string manifest;
  std::string dir;
};

int run_verify(const VerifyArgs& a) {
  const auto cfg = resolve(a.common);
  if (a.manifest.empty() && a.dir.empty()) {
    throw sv::InputError("dataset verify: give --manifest and/or --dir");
  }
  bool ok = true;
  auto print = [&](const char* what, const sv::datasets::VerifyReport& rep) {
    for (const auto& c : rep.checks) {
      std::cout << what << '\t' << (c.ok ? "ok  " : "FAIL") << '\t' << c.name << '\t' << c.detail << '\n';
    }
    ok = ok && rep.ok();
  };
  if (!a.manifest.empty()) print("ibf", sv::datasets::verify_ibf(a.manifest));
  if (!a.dir.empty()) {
    print("r2f", sv::datasets::verify_r2f(a.dir, cfg.datasets.r2f_columns,
                                          cfg.datasets.r2f_samples_per_file,
                                          cfg.datasets.r2f_sample_rate_hz));
  }
  if (!ok) throw sv::InputError("dataset verification failed");
  return 0;
}

void error_line(const char* kind, const std::string& message, int code) {
  const nlohmann::json j{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike-based vibration anomaly detection: filterbank, ADM encoder, balanced SNN."};
  app.name("spikevib");
  app.require_subcommand(1);

  FilterbankArgs fb;
  auto* c_fb = app.add_subcommand("filterbank", "Design the filterbank and print its coefficients");
  add_common(c_fb, fb.common);
  c_fb->add_flag("--inspect", fb.inspect, "Emit one CSV row per channel");
  c_fb->add_option("--sample-rate", fb.sample_rate, "Sample rate (Hz)")->required();
  c_fb->add_option("--out", fb.out, "Output file ('-' for stdout)");

  EncodeArgs enc;
  auto* c_enc = app.add_subcommand("encode", "Filter and ADM-encode a signal");
  add_common(c_enc, enc.common);
  c_enc->add_option("--input", enc.input, "Single-column signal CSV")->required()->check(CLI::ExistingFile);
  c_enc->add_option("--sample-rate", enc.sample_rate, "Sample rate (Hz); default from the file header");
  c_enc->add_option("--events", enc.events, "Events CSV ('-' for stdout)");
  c_enc->add_option("--trace", enc.trace, "Calibration trace CSV");

  TuneArgs tu;
  auto* c_tu = app.add_subcommand("tune", "Select output weight and time constant on a healthy window");
  add_common(c_tu, tu.common);
  c_tu->add_option("--events", tu.events, "Events CSV from 'encode'")->check(CLI::ExistingFile);
  c_tu->add_option("--input", tu.input, "Signal CSV (encoded first)")->check(CLI::ExistingFile);
  c_tu->add_option("--sample-rate", tu.sample_rate, "Sample rate of --input (Hz)");
  c_tu->add_option("--out", tu.out, "Tuning JSON ('-' for stdout)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the balanced network on encoded events");
  add_common(c_sim, sim.common);
  c_sim->add_option("--events", sim.events, "Events CSV from 'encode'")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--duration", sim.duration, "Run length (s); default from the file header");
  c_sim->add_option("--tuned", sim.tuned, "Tuning JSON from 'tune'")->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out, "Membrane trace CSV ('-' for stdout)");
  c_sim->add_option("--spikes", sim.spikes, "Spike CSV (hidden and output)");
  c_sim->add_option("--decimation", sim.decimation, "Keep every k-th membrane sample");

  BenchArgs bi;
  BenchArgs br;
  auto* c_bench = app.add_subcommand("bench", "End-to-end dataset benchmarks");
  c_bench->require_subcommand(1);
  auto* c_bi = c_bench->add_subcommand("ibf", "18 healthy/defective runs, confusion matrix");
  add_common(c_bi, bi.common);
  c_bi->add_option("--manifest", bi.manifest, "IBF manifest (TOML)")->required()->check(CLI::ExistingFile);
  c_bi->add_option("--out", bi.out, "Report JSON ('-' for stdout)");
  auto* c_br = c_bench->add_subcommand("r2f", "Run-to-failure detection datapoints");
  add_common(c_br, br.common);
  c_br->add_option("--dir", br.dir, "Directory of recordings")->required()->check(CLI::ExistingDirectory);
  c_br->add_option("--out", br.out, "Comparison CSV ('-' for stdout)");
  c_br->add_option("--json", br.json, "Per-bearing report JSON");

  SynthArgs sy;
  std::string sy_config;
  auto* c_sy = app.add_subcommand("synth", "Generate a synthetic test signal");
  c_sy->add_option("--spec", sy.spec, "Signal spec (TOML)")->required()->check(CLI::ExistingFile);
  c_sy->add_option("--config", sy_config, "Accepted for uniformity; unused")->check(CLI::ExistingFile);
  c_sy->add_option("--seed", sy.seed, "Override the spec seed");
  c_sy->add_option("--out", sy.out, "Signal CSV ('-' for stdout)");

  VerifyArgs ve;
  auto* c_ds = app.add_subcommand("dataset", "Dataset utilities");
  c_ds->require_subcommand(1);
  auto* c_ve = c_ds->add_subcommand("verify", "Check counts, rates, lengths and checksums");
  add_common(c_ve, ve.common);
  c_ve->add_option("--manifest", ve.manifest, "IBF manifest")->check(CLI::ExistingFile);
  c_ve->add_option("--dir", ve.dir, "R2F directory")->check(CLI::ExistingDirectory);

  if (argc <= 1) {
    std::cerr << app.help();
    error_line("usage", "no subcommand given", 2);
    return static_cast<int>(sv::ExitCode::kUsage);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    error_line("usage", e.what(), 2);
    return static_cast<int>(sv::ExitCode::kUsage);
  }

  try {
    if (*c_fb) return run_filterbank(fb);
    if (*c_enc) return run_encode(enc);
    if (*c_tu) return run_tune(tu);
    if (*c_sim) return run_simulate(sim);
    if (*c_bi) return run_bench_ibf(bi);
    if (*c_br) return run_bench_r2f(br);
    if (*c_sy) return run_synth(sy);
    if (*c_ve) return run_verify(ve);
  } catch (const sv::Error& e) {
    error_line(e.kind(), e.what(), static_cast<int>(e.exit_code()));
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    error_line("input", e.what(), 3);
    return static_cast<int>(sv::ExitCode::kInput);
  }
  return static_cast<int>(sv::ExitCode::kUsage);
}
