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
#include <span>
#include <vector>

namespace spikevib {

// Uniformly sampled scalar signal. Sample indices are the authoritative
// clock: the time of sample i is t0 + i / sample_rate.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(double sample_rate, std::vector<double> samples, double t0 = 0.0);

  double sample_rate() const noexcept { return sample_rate_; }
  double t0() const noexcept { return t0_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }
  double time_of(std::size_t i) const noexcept {
    return t0_ + static_cast<double>(i) / sample_rate_;
  }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

 private:
  double sample_rate_ = 1.0;
  std::vector<double> samples_;
  double t0_ = 0.0;
};

// a followed by b; keeps a's start time.
TimeSeries concat(const TimeSeries& a, const TimeSeries& b);

// Samples whose index falls in [t_start, t_end) relative to the series start.
TimeSeries slice(const TimeSeries& x, double t_start, double t_end);

// N equal-length channels at one sample rate (filterbank output).
class MultiChannelSeries {
 public:
  MultiChannelSeries() = default;
  MultiChannelSeries(double sample_rate, std::vector<std::vector<double>> channels,
                     double t0 = 0.0);

  double sample_rate() const noexcept { return sample_rate_; }
  double t0() const noexcept { return t0_; }
  std::size_t n_channels() const noexcept { return channels_.size(); }
  std::size_t length() const noexcept {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  std::span<const double> channel(std::size_t c) const { return channels_.at(c); }
  double duration() const noexcept {
    return static_cast<double>(length()) / sample_rate_;
  }

 private:
  double sample_rate_ = 1.0;
  std::vector<std::vector<double>> channels_;
  double t0_ = 0.0;
};

enum class Polarity : std::uint8_t { kUp = 0, kDown = 1 };

struct SpikeEvent {
  double time = 0.0;
  std::uint32_t channel = 0;
  Polarity polarity = Polarity::kUp;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

// Total order on events: time, then channel, then UP before DOWN.
bool event_less(const SpikeEvent& a, const SpikeEvent& b) noexcept;

class SpikeTrain {
 public:
  SpikeTrain() = default;
  // Sorts the events; rejects negative/non-finite times and times > duration.
  SpikeTrain(std::vector<SpikeEvent> events, double duration);

  std::span<const SpikeEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  double duration() const noexcept { return duration_; }

  // Largest channel index + 1 (0 when empty).
  std::size_t channel_span() const noexcept;

  SpikeTrain filter(Polarity polarity) const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  std::vector<SpikeEvent> events_;
  double duration_ = 0.0;
};

// Count of matching events in [t_start, t_end) divided by the window length.
double rate_in_window(const SpikeTrain& train, std::uint32_t channel, double t_start,
                      double t_end, Polarity polarity = Polarity::kUp);

}  // namespace spikevib
