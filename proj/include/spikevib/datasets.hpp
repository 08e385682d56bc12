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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spikevib/signal.hpp"

namespace spikevib::datasets {

enum class Label { kHealthy, kDefective, kUnknown };

const char* to_string(Label label) noexcept;
// Accepts "healthy", "defective", "unknown" (case-insensitive).
Label parse_label(const std::string& text);

struct Recording {
  TimeSeries series;
  std::string source_id;
  Label label = Label::kUnknown;
};

// Headerless whitespace-separated numeric matrix, one row per sample.
// Every row must have the same number of columns. When expected_rows is
// non-zero, any other row count is an error.
std::vector<std::vector<double>> read_ascii_columns(const std::filesystem::path& path,
                                                    std::size_t expected_rows = 0);

Recording load_ascii_matrix(const std::filesystem::path& path, std::size_t column,
                            double sample_rate, std::size_t expected_rows = 0);

// Single-column headerless CSV. Lines starting with '#' are comments.
Recording load_csv_recording(const std::filesystem::path& path, double sample_rate);

enum class RunKind { kHealthyHealthy, kHealthyDefective };

const char* to_string(RunKind kind) noexcept;

struct RunSpec {
  std::vector<std::shared_ptr<const Recording>> segments;
  // Time at which the condition may change (end of the first segment).
  std::optional<double> transition_time;
  std::string run_id;
  RunKind kind = RunKind::kHealthyHealthy;

  // Concatenated samples.
  TimeSeries series() const;
  double duration() const;
  double sample_rate() const;
};

// All ordered pairs (h, x) with h healthy and x from healthy then defective:
// 3 * 6 = 18 runs, healthy index major, partner index minor.
std::vector<RunSpec> build_ibf_runs(const std::vector<Recording>& healthy,
                                    const std::vector<Recording>& defective);

struct R2fStream {
  std::size_t bearing_id = 1;
  TimeSeries series;
  std::size_t n_recordings = 0;
  std::size_t samples_per_recording = 0;
  std::vector<std::string> sources;

  double recording_duration() const {
    return static_cast<double>(samples_per_recording) / series.sample_rate();
  }
  // 1-based index of the recording that contains time t.
  std::size_t recording_index(double t) const;
  // Start time of 1-based recording k.
  double time_of_start(std::size_t k) const;
};

// Concatenates recordings in the given order. Every recording must have
// samples_per_recording samples at sample_rate.
R2fStream build_r2f_stream(const std::vector<Recording>& recordings, std::size_t bearing,
                           std::size_t samples_per_recording = 20480,
                           double sample_rate = 20000.0);

// Regular, non-hidden files in lexicographic order.
std::vector<std::filesystem::path> list_r2f_files(const std::filesystem::path& dir);

// One stream per entry of `columns`; bearing k reads columns[k - 1].
std::vector<R2fStream> load_r2f_dir(const std::filesystem::path& dir,
                                    const std::vector<std::size_t>& columns,
                                    std::size_t samples_per_recording = 20480,
                                    double sample_rate = 20000.0);

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest directory
  Label label = Label::kUnknown;
  double sample_rate_hz = 0.0;
  std::optional<std::string> sha256;
};

// TOML file with one [[recording]] table per trial: path, label,
// sample_rate_hz and an optional sha256.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct IbfSet {
  std::vector<Recording> healthy;
  std::vector<Recording> defective;
};

// Loads every manifest entry (checking checksums when given).
IbfSet load_ibf(const std::filesystem::path& manifest);

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  bool ok() const;
};

inline constexpr std::size_t kR2fRecordings = 984;
inline constexpr double kIbfTrialSeconds = 6.0;

// Counts, sample rates, checksums, per-recording length (6 s, +-1 sample) and
// the 12 s run duration.
VerifyReport verify_ibf(const std::filesystem::path& manifest);

// File count, per-file rows, and per-bearing stream length.
VerifyReport verify_r2f(const std::filesystem::path& dir, const std::vector<std::size_t>& columns,
                        std::size_t samples_per_recording = 20480, double sample_rate = 20000.0,
                        std::size_t expected_recordings = kR2fRecordings);

}  // namespace spikevib::datasets
