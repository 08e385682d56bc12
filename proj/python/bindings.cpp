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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spikevib/bench.hpp"
#include "spikevib/cochlea.hpp"
#include "spikevib/config.hpp"
#include "spikevib/encoder.hpp"
#include "spikevib/error.hpp"
#include "spikevib/snn.hpp"
#include "spikevib/synth.hpp"

namespace py = pybind11;
namespace sv = spikevib;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

sv::TimeSeries to_series(const Array& x, double sample_rate) {
  if (x.ndim() != 1) throw sv::InputError("expected a 1-D array");
  return sv::TimeSeries(sample_rate, std::vector<double>(x.data(), x.data() + x.size()));
}

Array to_array(std::span<const double> x) {
  Array out(static_cast<py::ssize_t>(x.size()));
  std::copy(x.begin(), x.end(), out.mutable_data());
  return out;
}

// (times, channels) arrays of the UP events.
py::tuple events_to_arrays(const sv::SpikeTrain& t) {
  Array times(static_cast<py::ssize_t>(t.size()));
  py::array_t<std::uint32_t> channels(static_cast<py::ssize_t>(t.size()));
  auto* tp = times.mutable_data();
  auto* cp = channels.mutable_data();
  for (std::size_t i = 0; i < t.size(); ++i) {
    tp[i] = t.events()[i].time;
    cp[i] = t.events()[i].channel;
  }
  return py::make_tuple(times, channels);
}

sv::SpikeTrain arrays_to_events(const Array& times, const py::array_t<std::uint32_t>& channels,
                                double duration) {
  if (times.size() != channels.size()) throw sv::InputError("times and channels differ in length");
  std::vector<sv::SpikeEvent> ev;
  ev.reserve(static_cast<std::size_t>(times.size()));
  for (py::ssize_t i = 0; i < times.size(); ++i) {
    ev.push_back({times.data()[i], channels.data()[i], sv::Polarity::kUp});
  }
  return sv::SpikeTrain(std::move(ev), duration);
}

sv::PipelineConfig make_config(const std::string& path, const std::vector<std::string>& overrides) {
  return path.empty() ? sv::default_config(overrides) : sv::load_config(path, overrides);
}

}  // namespace

PYBIND11_MODULE(_spikevib, m) {
  m.doc() = "Gammatone filterbank, adaptive delta modulator and balanced spiking network.";

  static py::exception<sv::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sv::Error& e) {
      py::set_error(error, (std::string(e.kind()) + ": " + e.what()).c_str());
    }
  });

  py::class_<sv::PipelineConfig>(m, "PipelineConfig")
      .def(py::init([](const std::string& path, const std::vector<std::string>& overrides) {
             return make_config(path, overrides);
           }),
           py::arg("path") = "", py::arg("overrides") = std::vector<std::string>{})
      .def("to_toml", [](const sv::PipelineConfig& c) { return sv::to_toml(c); })
      .def("hash", [](const sv::PipelineConfig& c) { return sv::config_hash(c); })
      .def_property_readonly("n_channels", [](const sv::PipelineConfig& c) { return c.filterbank.n_channels; })
      .def_property_readonly("t_adapt", [](const sv::PipelineConfig& c) { return c.calib.t_adapt; })
      .def_property_readonly("f_target", [](const sv::PipelineConfig& c) { return c.calib.f_target; });

  m.def("center_frequencies",
        [](std::size_t n, double f_min, double f_max) {
          sv::cochlea::FilterbankConfig c;
          c.n_channels = n;
          c.f_min_hz = f_min;
          c.f_max_hz = f_max;
          return sv::cochlea::center_frequencies(c);
        },
        py::arg("n_channels"), py::arg("f_min_hz"), py::arg("f_max_hz"));

  m.def("gammatone", [](double f_c, double b, double t) {
    return sv::cochlea::impulse_response_reference({f_c, b, sv::cochlea::kGammatoneOrder, 1.0, 0.0}, t);
  }, py::arg("f_c"), py::arg("b"), py::arg("t"));

  m.def("channel_magnitude",
        [](double f_c, double sample_rate, double f) {
          return sv::cochlea::design_channel(f_c, sample_rate).magnitude(f);
        },
        py::arg("f_c"), py::arg("sample_rate"), py::arg("f"));

  m.def("filterbank",
        [](const Array& x, double sample_rate, const sv::PipelineConfig& cfg) {
          sv::cochlea::Filterbank bank(cfg.filterbank, sample_rate);
          const auto y = bank.process(to_series(x, sample_rate));
          py::array_t<double> out({static_cast<py::ssize_t>(y.n_channels()),
                                   static_cast<py::ssize_t>(y.length())});
          auto* p = out.mutable_data();
          for (std::size_t c = 0; c < y.n_channels(); ++c) {
            std::copy(y.channel(c).begin(), y.channel(c).end(), p + c * y.length());
          }
          return out;
        },
        py::arg("x"), py::arg("sample_rate"), py::arg("config") = sv::PipelineConfig{});

  m.def("encode",
        [](const Array& x, double sample_rate, const sv::PipelineConfig& cfg) {
          const auto r = sv::bench::encode_stream(to_series(x, sample_rate), cfg);
          return events_to_arrays(r.up);
        },
        py::arg("x"), py::arg("sample_rate"), py::arg("config") = sv::PipelineConfig{},
        "Filter and encode; returns (times, channels) of the UP events.");

  m.def("tune",
        [](const Array& times, const py::array_t<std::uint32_t>& channels, double duration,
           const sv::PipelineConfig& cfg) {
          const auto t = sv::bench::tune_on(arrays_to_events(times, channels, duration), cfg);
          return py::dict(py::arg("w_ho") = t.w_ho, py::arg("tau_c") = t.tau_c,
                          py::arg("peak_v") = t.peak_v, py::arg("margin") = t.margin);
        },
        py::arg("times"), py::arg("channels"), py::arg("duration"),
        py::arg("config") = sv::PipelineConfig{});

  m.def("simulate",
        [](const Array& times, const py::array_t<std::uint32_t>& channels, double duration,
           double w_ho, double tau_c, const sv::PipelineConfig& cfg) {
          sv::snn::TuneResult t;
          t.w_ho = w_ho;
          t.tau_c = tau_c;
          sv::snn::SimTrace trace;
          const auto first = sv::bench::first_detection(arrays_to_events(times, channels, duration),
                                                        duration, cfg, t, &trace);
          std::vector<double> spikes;
          for (const auto& e : trace.output_spikes.events()) spikes.push_back(e.time);
          std::vector<double> vt;
          std::vector<double> vv;
          for (const auto& s : trace.v_mem_output) {
            vt.push_back(s.time);
            vv.push_back(s.v);
          }
          return py::dict(py::arg("first_spike") = first,
                          py::arg("output_spikes") = to_array(spikes),
                          py::arg("v_time") = to_array(vt), py::arg("v_mem") = to_array(vv),
                          py::arg("peak_v") = trace.peak_v_output);
        },
        py::arg("times"), py::arg("channels"), py::arg("duration"), py::arg("w_ho"),
        py::arg("tau_c"), py::arg("config") = sv::PipelineConfig{});

  m.def("regenerate_poisson",
        [](const Array& times, const py::array_t<std::uint32_t>& channels, double duration,
           double interval, std::uint64_t seed) {
          return events_to_arrays(
              sv::snn::regenerate_poisson(arrays_to_events(times, channels, duration), interval, seed));
        },
        py::arg("times"), py::arg("channels"), py::arg("duration"), py::arg("interval"),
        py::arg("seed"));

  m.def("synth",
        [](double duration, double sample_rate, const std::vector<std::pair<double, double>>& components,
           double noise_std, std::uint64_t seed, double burst_gain, double burst_onset) {
          sv::synth::SynthSpec s;
          s.duration_s = duration;
          s.sample_rate = sample_rate;
          for (const auto& [f, a] : components) s.components.push_back({f, a});
          s.noise_std = noise_std;
          s.seed = seed;
          if (burst_gain != 1.0) s.anomaly = {sv::synth::AnomalyKind::kAmplitudeBurst, burst_gain, burst_onset};
          return to_array(sv::synth::synth(s).samples());
        },
        py::arg("duration"), py::arg("sample_rate"),
        py::arg("components") = std::vector<std::pair<double, double>>{}, py::arg("noise_std") = 0.0,
        py::arg("seed") = 0, py::arg("burst_gain") = 1.0, py::arg("burst_onset") = 0.0);

  m.def("detection_datapoint", &sv::bench::detection_datapoint, py::arg("t"),
        py::arg("recording_duration") = 1.024);
}
