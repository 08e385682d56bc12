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

#include "spikevib/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikevib/error.hpp"

namespace spikevib {

TimeSeries::TimeSeries(double sample_rate, std::vector<double> samples, double t0)
    : sample_rate_(sample_rate), samples_(std::move(samples)), t0_(t0) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw InputError("sample rate must be positive and finite");
  }
  if (!std::isfinite(t0_)) throw InputError("t0 must be finite");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InputError("non-finite sample at index " + std::to_string(i));
    }
  }
}

TimeSeries concat(const TimeSeries& a, const TimeSeries& b) {
  if (a.sample_rate() != b.sample_rate()) {
    throw InputError("concat: sample-rate mismatch (" + std::to_string(a.sample_rate()) +
                     " vs " + std::to_string(b.sample_rate()) + ")");
  }
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.samples().begin(), a.samples().end());
  out.insert(out.end(), b.samples().begin(), b.samples().end());
  return TimeSeries(a.sample_rate(), std::move(out), a.t0());
}

TimeSeries slice(const TimeSeries& x, double t_start, double t_end) {
  if (!(t_start >= 0.0) || !(t_start < t_end) || t_end > x.duration()) {
    throw InputError("slice: window [" + std::to_string(t_start) + ", " +
                     std::to_string(t_end) + ") outside [0, " +
                     std::to_string(x.duration()) + "]");
  }
  // Round to the nearest sample so that window edges computed from sample
  // counts (e.g. k / fs) land exactly on the intended index.
  const auto first = static_cast<std::size_t>(std::llround(t_start * x.sample_rate()));
  const auto last = std::min(
      x.size(), static_cast<std::size_t>(std::llround(t_end * x.sample_rate())));
  std::vector<double> out(x.samples().begin() + static_cast<std::ptrdiff_t>(first),
                          x.samples().begin() + static_cast<std::ptrdiff_t>(last));
  return TimeSeries(x.sample_rate(), std::move(out), x.time_of(first));
}

MultiChannelSeries::MultiChannelSeries(double sample_rate,
                                       std::vector<std::vector<double>> channels, double t0)
    : sample_rate_(sample_rate), channels_(std::move(channels)), t0_(t0) {
  if (!(sample_rate_ > 0.0)) throw InputError("sample rate must be positive");
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size()) {
      throw InputError("all channels must have the same length");
    }
  }
}

bool event_less(const SpikeEvent& a, const SpikeEvent& b) noexcept {
  if (a.time != b.time) return a.time < b.time;
  if (a.channel != b.channel) return a.channel < b.channel;
  return a.polarity < b.polarity;
}

SpikeTrain::SpikeTrain(std::vector<SpikeEvent> events, double duration)
    : events_(std::move(events)), duration_(duration) {
  if (!(duration_ >= 0.0) || !std::isfinite(duration_)) {
    throw InputError("spike train duration must be finite and non-negative");
  }
  for (const auto& e : events_) {
    if (!std::isfinite(e.time) || e.time < 0.0) {
      throw InputError("spike time must be finite and non-negative");
    }
    if (e.time > duration_) {
      throw InputError("spike at t=" + std::to_string(e.time) + " exceeds duration " +
                       std::to_string(duration_));
    }
  }
  if (!std::is_sorted(events_.begin(), events_.end(), event_less)) {
    std::stable_sort(events_.begin(), events_.end(), event_less);
  }
}

std::size_t SpikeTrain::channel_span() const noexcept {
  std::size_t n = 0;
  for (const auto& e : events_) n = std::max<std::size_t>(n, e.channel + 1);
  return n;
}

SpikeTrain SpikeTrain::filter(Polarity polarity) const {
  std::vector<SpikeEvent> out;
  for (const auto& e : events_) {
    if (e.polarity == polarity) out.push_back(e);
  }
  SpikeTrain t;
  t.events_ = std::move(out);
  t.duration_ = duration_;
  return t;
}

double rate_in_window(const SpikeTrain& train, std::uint32_t channel, double t_start,
                      double t_end, Polarity polarity) {
  if (!(t_start < t_end)) throw InputError("rate_in_window: t_start must precede t_end");
  const auto events = train.events();
  auto it = std::lower_bound(events.begin(), events.end(), t_start,
                             [](const SpikeEvent& e, double t) { return e.time < t; });
  std::size_t count = 0;
  for (; it != events.end() && it->time < t_end; ++it) {
    if (it->channel == channel && it->polarity == polarity) ++count;
  }
  return static_cast<double>(count) / (t_end - t_start);
}

}  // namespace spikevib
