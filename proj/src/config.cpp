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

#include "spikevib/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "spikevib/error.hpp"

namespace spikevib {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

toml::table parse_toml(std::string_view text, const std::string& source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ParseError(source, e.source().begin.line, std::string(e.description()));
  }
}

// Reads typed values and remembers every key it was asked about, so that
// leftover keys in the document can be reported as unknown.
class Reader {
 public:
  Reader(const toml::table& root, std::string source) : root_(root), source_(std::move(source)) {}

  template <typename T>
  void get(std::string_view section, std::string_view key, T& out) {
    const std::string path = join(section, key);
    known_.insert(path);
    const toml::node* node = find(section, key);
    if (node == nullptr) return;
    assign(*node, path, out);
  }

  void reject_unknown() const {
    for (const auto& [k, v] : root_) {
      const std::string top(k.str());
      if (const auto* t = v.as_table()) {
        if (!sections_.contains(top)) throw InputError(source_ + ": unknown section [" + top + "]");
        for (const auto& [k2, v2] : *t) {
          (void)v2;
          const std::string path = top + "." + std::string(k2.str());
          if (!known_.contains(path)) throw InputError(source_ + ": unknown key " + path);
        }
      } else if (!known_.contains(top)) {
        throw InputError(source_ + ": unknown key " + top);
      }
    }
  }

  void section(std::string_view name) { sections_.insert(std::string(name)); }

 private:
  static std::string join(std::string_view section, std::string_view key) {
    return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
  }

  const toml::node* find(std::string_view section, std::string_view key) const {
    if (section.empty()) return root_.get(key);
    const toml::node* sec = root_.get(section);
    if (sec == nullptr) return nullptr;
    const toml::table* t = sec->as_table();
    if (t == nullptr) throw InputError(source_ + ": " + std::string(section) + " must be a table");
    return t->get(key);
  }

  [[noreturn]] void type_error(const std::string& path, const char* want) const {
    throw InputError(source_ + ": " + path + " must be " + want);
  }

  void assign(const toml::node& n, const std::string& path, double& out) const {
    if (auto v = n.value<double>(); v && (n.is_floating_point() || n.is_integer())) {
      out = *v;
      return;
    }
    type_error(path, "a number");
  }

  void assign(const toml::node& n, const std::string& path, std::size_t& out) const {
    if (auto v = n.value_exact<std::int64_t>(); v && *v >= 0) {
      out = static_cast<std::size_t>(*v);
      return;
    }
    type_error(path, "a non-negative integer");
  }

  void assign(const toml::node& n, const std::string& path, bool& out) const {
    if (auto v = n.value_exact<bool>()) {
      out = *v;
      return;
    }
    type_error(path, "a boolean");
  }

  template <typename T>
  void assign(const toml::node& n, const std::string& path, std::vector<T>& out) const {
    const toml::array* a = n.as_array();
    if (a == nullptr) type_error(path, "an array");
    std::vector<T> values;
    for (std::size_t i = 0; i < a->size(); ++i) {
      T v{};
      assign(*a->get(i), path + "[" + std::to_string(i) + "]", v);
      values.push_back(v);
    }
    out = std::move(values);
  }

  const toml::table& root_;
  std::string source_;
  std::set<std::string> known_;
  std::set<std::string> sections_;
};

void apply_override(toml::table& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InputError("override '" + spec + "' must look like section.key=value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);

  toml::table* t = &root;
  std::string key = path;
  for (auto dot = key.find('.'); dot != std::string::npos; dot = key.find('.')) {
    const std::string head = key.substr(0, dot);
    key = key.substr(dot + 1);
    if (!t->contains(head)) t->insert(head, toml::table{});
    t = (*t)[head].as_table();
    if (t == nullptr) throw InputError("override '" + spec + "': " + head + " is not a table");
  }

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + value);
  } catch (const toml::parse_error&) {
    parsed.insert("v", value);
  }
  t->insert_or_assign(key, *parsed.get("v"));
}

PipelineConfig from_table(const toml::table& root, const std::string& source) {
  PipelineConfig c;
  Reader r(root, source);
  std::size_t seed = static_cast<std::size_t>(c.seed);
  r.get("", "seed", seed);
  c.seed = seed;

  r.section("filterbank");
  r.get("filterbank", "n_channels", c.filterbank.n_channels);
  r.get("filterbank", "f_min_hz", c.filterbank.f_min_hz);
  r.get("filterbank", "f_max_hz", c.filterbank.f_max_hz);
  r.get("filterbank", "bandwidth_hz", c.filterbank.bandwidth_hz);

  r.section("encoder");
  r.get("encoder", "t_adapt_s", c.calib.t_adapt);
  r.get("encoder", "f_target_hz", c.calib.f_target);
  r.get("encoder", "eta", c.calib.eta);
  r.get("encoder", "tau_avg_steps", c.calib.tau_avg);
  r.get("encoder", "t_refractory_s", c.adm.t_r);
  r.get("encoder", "thr_floor", c.adm.thr_floor);
  r.get("encoder", "v_thr_init", c.adm.v_thr_init);
  r.get("encoder", "init_window_s", c.adm.init_window_s);

  r.section("snn");
  r.get("snn", "alpha", c.bsnn.alpha);
  r.get("snn", "w_inh", c.bsnn.w_inh);
  r.get("snn", "w_ho", c.bsnn.w_ho);
  r.get("snn", "dt_s", c.bsnn.dt);
  r.get("snn", "r", c.lif.r);
  r.get("snn", "c", c.lif.c);
  r.get("snn", "v_rest", c.lif.v_rest);
  r.get("snn", "v_thr", c.lif.v_thr);
  r.get("snn", "v_reset", c.lif.v_reset);
  r.get("snn", "t_ref_s", c.lif.t_ref);

  r.section("tuning");
  r.get("tuning", "window_s", c.tuning.window_s);
  r.get("tuning", "headroom", c.tuning.headroom);
  r.get("tuning", "w_ho_min_rel", c.tuning.grid.w_ho_min_rel);
  r.get("tuning", "w_ho_max_rel", c.tuning.grid.w_ho_max_rel);
  r.get("tuning", "n_w_ho", c.tuning.grid.n_w_ho);
  r.get("tuning", "tau_min_s", c.tuning.grid.tau_min);
  r.get("tuning", "tau_max_s", c.tuning.grid.tau_max);
  r.get("tuning", "n_tau", c.tuning.grid.n_tau);

  r.section("poisson");
  r.get("poisson", "enabled", c.poisson_enabled);
  r.get("poisson", "interval_s", c.poisson_interval_s);

  r.section("stream");
  r.get("stream", "chunk_samples", c.chunk_samples);

  r.section("datasets");
  r.get("datasets", "ibf_sample_rate_hz", c.datasets.ibf_sample_rate_hz);
  r.get("datasets", "ibf_tuning_run", c.datasets.ibf_tuning_run);
  r.get("datasets", "r2f_sample_rate_hz", c.datasets.r2f_sample_rate_hz);
  r.get("datasets", "r2f_samples_per_file", c.datasets.r2f_samples_per_file);
  r.get("datasets", "r2f_columns", c.datasets.r2f_columns);
  r.get("datasets", "r2f_tune_per_bearing", c.datasets.r2f_tune_per_bearing);
  r.get("datasets", "r2f_tuning_bearing", c.datasets.r2f_tuning_bearing);

  r.reject_unknown();
  c.bsnn.n = c.filterbank.n_channels;
  validate(c);
  return c;
}

PipelineConfig build(toml::table root, const std::string& source,
                     const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) apply_override(root, o);
  return from_table(root, source);
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

std::string fmt(std::size_t v) { return std::to_string(v); }

std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string fmt(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

}  // namespace

void validate(const PipelineConfig& c) {
  const auto& fb = c.filterbank;
  if (fb.n_channels < 1) throw InputError("filterbank.n_channels must be >= 1");
  if (!(fb.f_min_hz > 0.0)) throw InputError("filterbank.f_min_hz must be positive");
  if (fb.f_max_hz > 0.0 && !(fb.f_max_hz > fb.f_min_hz) && fb.n_channels > 1) {
    throw InputError("filterbank.f_max_hz must exceed f_min_hz");
  }
  if (!fb.bandwidth_hz.empty() && fb.bandwidth_hz.size() != fb.n_channels) {
    throw InputError("filterbank.bandwidth_hz needs one value per channel");
  }
  encoder::validate(c.adm);
  encoder::validate(c.calib);
  snn::BsnnConfig b = c.bsnn;
  b.n = fb.n_channels;
  snn::validate(b);
  snn::validate(c.lif);
  if (!(c.tuning.window_s > 0.0)) throw InputError("tuning.window_s must be positive");
  if (c.calib.t_adapt > c.tuning.window_s) {
    throw InputError("encoder.t_adapt_s must not exceed tuning.window_s");
  }
  if (!(c.tuning.headroom >= 0.0) || !(c.tuning.headroom < 1.0)) {
    throw InputError("tuning.headroom must lie in [0, 1)");
  }
  const auto& g = c.tuning.grid;
  if (!(g.w_ho_min_rel > 0.0) || !(g.w_ho_max_rel >= g.w_ho_min_rel) || g.n_w_ho == 0) {
    throw InputError("tuning: invalid w_ho range");
  }
  if (!(g.tau_min > 0.0) || !(g.tau_max >= g.tau_min) || g.n_tau == 0) {
    throw InputError("tuning: invalid tau range");
  }
  if (!(c.poisson_interval_s > 0.0)) throw InputError("poisson.interval_s must be positive");
  if (c.chunk_samples == 0) throw InputError("stream.chunk_samples must be positive");
  const auto& d = c.datasets;
  if (!(d.ibf_sample_rate_hz > 0.0) || !(d.r2f_sample_rate_hz > 0.0)) {
    throw InputError("datasets: sample rates must be positive");
  }
  if (d.r2f_samples_per_file == 0) throw InputError("datasets.r2f_samples_per_file must be positive");
  if (d.r2f_columns.empty()) throw InputError("datasets.r2f_columns must not be empty");
  if (d.r2f_tuning_bearing < 1 || d.r2f_tuning_bearing > d.r2f_columns.size()) {
    throw InputError("datasets.r2f_tuning_bearing out of range");
  }
}

PipelineConfig parse_config(std::string_view text, const std::string& source,
                            const std::vector<std::string>& overrides) {
  return build(parse_toml(text, source), source, overrides);
}

PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides) {
  return parse_config(read_file(path), path.string(), overrides);
}

PipelineConfig default_config(const std::vector<std::string>& overrides) {
  return build(toml::table{}, "<defaults>", overrides);
}

std::string to_toml(const PipelineConfig& c) {
  std::ostringstream o;
  o << "seed = " << c.seed << "\n";
  o << "\n[filterbank]\n"
    << "n_channels = " << fmt(c.filterbank.n_channels) << "\n"
    << "f_min_hz = " << fmt(c.filterbank.f_min_hz) << "\n"
    << "f_max_hz = " << fmt(c.filterbank.f_max_hz) << "\n"
    << "bandwidth_hz = " << fmt(c.filterbank.bandwidth_hz) << "\n";
  o << "\n[encoder]\n"
    << "t_adapt_s = " << fmt(c.calib.t_adapt) << "\n"
    << "f_target_hz = " << fmt(c.calib.f_target) << "\n"
    << "eta = " << fmt(c.calib.eta) << "\n"
    << "tau_avg_steps = " << fmt(c.calib.tau_avg) << "\n"
    << "t_refractory_s = " << fmt(c.adm.t_r) << "\n"
    << "thr_floor = " << fmt(c.adm.thr_floor) << "\n"
    << "v_thr_init = " << fmt(c.adm.v_thr_init) << "\n"
    << "init_window_s = " << fmt(c.adm.init_window_s) << "\n";
  o << "\n[snn]\n"
    << "alpha = " << fmt(c.bsnn.alpha) << "\n"
    << "w_inh = " << fmt(c.bsnn.w_inh) << "\n"
    << "w_ho = " << fmt(c.bsnn.w_ho) << "\n"
    << "dt_s = " << fmt(c.bsnn.dt) << "\n"
    << "r = " << fmt(c.lif.r) << "\n"
    << "c = " << fmt(c.lif.c) << "\n"
    << "v_rest = " << fmt(c.lif.v_rest) << "\n"
    << "v_thr = " << fmt(c.lif.v_thr) << "\n"
    << "v_reset = " << fmt(c.lif.v_reset) << "\n"
    << "t_ref_s = " << fmt(c.lif.t_ref) << "\n";
  o << "\n[tuning]\n"
    << "window_s = " << fmt(c.tuning.window_s) << "\n"
    << "headroom = " << fmt(c.tuning.headroom) << "\n"
    << "w_ho_min_rel = " << fmt(c.tuning.grid.w_ho_min_rel) << "\n"
    << "w_ho_max_rel = " << fmt(c.tuning.grid.w_ho_max_rel) << "\n"
    << "n_w_ho = " << fmt(c.tuning.grid.n_w_ho) << "\n"
    << "tau_min_s = " << fmt(c.tuning.grid.tau_min) << "\n"
    << "tau_max_s = " << fmt(c.tuning.grid.tau_max) << "\n"
    << "n_tau = " << fmt(c.tuning.grid.n_tau) << "\n";
  o << "\n[poisson]\n"
    << "enabled = " << fmt(c.poisson_enabled) << "\n"
    << "interval_s = " << fmt(c.poisson_interval_s) << "\n";
  o << "\n[stream]\n"
    << "chunk_samples = " << fmt(c.chunk_samples) << "\n";
  o << "\n[datasets]\n"
    << "ibf_sample_rate_hz = " << fmt(c.datasets.ibf_sample_rate_hz) << "\n"
    << "ibf_tuning_run = " << fmt(c.datasets.ibf_tuning_run) << "\n"
    << "r2f_sample_rate_hz = " << fmt(c.datasets.r2f_sample_rate_hz) << "\n"
    << "r2f_samples_per_file = " << fmt(c.datasets.r2f_samples_per_file) << "\n"
    << "r2f_columns = " << fmt(c.datasets.r2f_columns) << "\n"
    << "r2f_tune_per_bearing = " << fmt(c.datasets.r2f_tune_per_bearing) << "\n"
    << "r2f_tuning_bearing = " << fmt(c.datasets.r2f_tuning_bearing) << "\n";
  return o.str();
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const PipelineConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_toml(cfg))));
  return buf;
}

synth::SynthSpec parse_synth_spec(std::string_view text, const std::string& source) {
  const toml::table root = parse_toml(text, source);
  synth::SynthSpec s;
  s.components.clear();
  for (const auto& [k, v] : root) {
    const std::string key(k.str());
    auto number = [&](double& out) {
      if (auto x = v.value<double>(); x && (v.is_floating_point() || v.is_integer())) {
        out = *x;
      } else {
        throw InputError(source + ": " + key + " must be a number");
      }
    };
    if (key == "duration_s") {
      number(s.duration_s);
    } else if (key == "sample_rate_hz") {
      number(s.sample_rate);
    } else if (key == "noise_std") {
      number(s.noise_std);
    } else if (key == "seed") {
      auto x = v.value_exact<std::int64_t>();
      if (!x || *x < 0) throw InputError(source + ": seed must be a non-negative integer");
      s.seed = static_cast<std::uint64_t>(*x);
    } else if (key == "component") {
      const auto* arr = v.as_array();
      if (arr == nullptr) throw InputError(source + ": component must be an array of tables");
      for (const auto& item : *arr) {
        const auto* t = item.as_table();
        if (t == nullptr) throw InputError(source + ": component entries must be tables");
        synth::Component comp;
        for (const auto& [ck, cv] : *t) {
          const auto x = cv.value<double>();
          if (!x || !(cv.is_floating_point() || cv.is_integer())) {
            throw InputError(source + ": component." + std::string(ck.str()) + " must be a number");
          }
          if (ck == "frequency_hz") {
            comp.frequency_hz = *x;
          } else if (ck == "amplitude") {
            comp.amplitude = *x;
          } else {
            throw InputError(source + ": unknown key component." + std::string(ck.str()));
          }
        }
        s.components.push_back(comp);
      }
    } else if (key == "anomaly") {
      const auto* t = v.as_table();
      if (t == nullptr) throw InputError(source + ": anomaly must be a table");
      for (const auto& [ak, av] : *t) {
        if (ak == "kind") {
          const auto kind = av.value_exact<std::string>();
          if (!kind) throw InputError(source + ": anomaly.kind must be a string");
          if (*kind == "none") {
            s.anomaly.kind = synth::AnomalyKind::kNone;
          } else if (*kind == "rate-shift") {
            s.anomaly.kind = synth::AnomalyKind::kRateShift;
          } else if (*kind == "amplitude-burst") {
            s.anomaly.kind = synth::AnomalyKind::kAmplitudeBurst;
          } else {
            throw InputError(source + ": anomaly.kind must be none, rate-shift or amplitude-burst");
          }
        } else if (ak == "factor" || ak == "onset_s") {
          const auto x = av.value<double>();
          if (!x || !(av.is_floating_point() || av.is_integer())) {
            throw InputError(source + ": anomaly." + std::string(ak.str()) + " must be a number");
          }
          (ak == "factor" ? s.anomaly.factor : s.anomaly.onset_s) = *x;
        } else {
          throw InputError(source + ": unknown key anomaly." + std::string(ak.str()));
        }
      }
    } else {
      throw InputError(source + ": unknown key " + key);
    }
  }
  synth::validate(s);
  return s;
}

synth::SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(read_file(path), path.string());
}

std::string to_toml(const synth::SynthSpec& s) {
  std::ostringstream o;
  o << "duration_s = " << fmt(s.duration_s) << "\n"
    << "sample_rate_hz = " << fmt(s.sample_rate) << "\n"
    << "noise_std = " << fmt(s.noise_std) << "\n"
    << "seed = " << s.seed << "\n";
  const char* kind = "none";
  if (s.anomaly.kind == synth::AnomalyKind::kRateShift) kind = "rate-shift";
  if (s.anomaly.kind == synth::AnomalyKind::kAmplitudeBurst) kind = "amplitude-burst";
  o << "\n[anomaly]\n"
    << "kind = \"" << kind << "\"\n"
    << "factor = " << fmt(s.anomaly.factor) << "\n"
    << "onset_s = " << fmt(s.anomaly.onset_s) << "\n";
  for (const auto& c : s.components) {
    o << "\n[[component]]\n"
      << "frequency_hz = " << fmt(c.frequency_hz) << "\n"
      << "amplitude = " << fmt(c.amplitude) << "\n";
  }
  return o.str();
}

}  // namespace spikevib
