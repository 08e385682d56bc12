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

// Seeded generators for property tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "spikevib/signal.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(rng_);
  }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return index(2) == 1; }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> x(n);
    for (auto& v : x) v = normal(0.0, sd);
    return x;
  }

  spikevib::TimeSeries series(double rate, std::size_t n, double sd = 1.0) {
    return spikevib::TimeSeries(rate, normals(n, sd));
  }

  // Events with random times in [0, duration], channels < n_channels.
  std::vector<spikevib::SpikeEvent> events(std::size_t n, std::size_t n_channels, double duration) {
    std::vector<spikevib::SpikeEvent> ev(n);
    for (auto& e : ev) {
      e.time = uniform(0.0, duration);
      e.channel = static_cast<std::uint32_t>(index(n_channels));
      e.polarity = coin() ? spikevib::Polarity::kUp : spikevib::Polarity::kDown;
    }
    return ev;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
