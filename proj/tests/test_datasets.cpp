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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "spikevib/datasets.hpp"
#include "spikevib/error.hpp"

using namespace spikevib;
using namespace spikevib::datasets;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("spikevib_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string matrix_text(std::size_t rows, std::size_t cols, double offset = 0.0) {
  std::string s;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      s += std::to_string(offset + static_cast<double>(r) * 1e-3 + static_cast<double>(c));
      s += c + 1 < cols ? "\t" : "\n";
    }
  }
  return s;
}

Recording constant(double value, std::size_t n, double fs, Label label, std::string id) {
  return {TimeSeries(fs, std::vector<double>(n, value)), std::move(id), label};
}

std::size_t parse_line(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Ascii, ReadsFullR2fShape) {
  TempDir d;
  const auto p = d.write("2004.02.12.10.32.39", matrix_text(20480, 4));
  const auto cols = read_ascii_columns(p, 20480);
  ASSERT_EQ(cols.size(), 4u);
  for (const auto& c : cols) EXPECT_EQ(c.size(), 20480u);
  EXPECT_DOUBLE_EQ(cols[2][10], 2.01);
  const auto rec = load_ascii_matrix(p, 3, 20000.0, 20480);
  EXPECT_DOUBLE_EQ(rec.series.duration(), 1.024);
  EXPECT_THROW(load_ascii_matrix(p, 4, 20000.0), InputError);
}

TEST(Ascii, MalformedInputsReportLines) {
  TempDir d;
  EXPECT_EQ(parse_line([&] { read_ascii_columns(d.write("empty", "")); }), 1u);
  EXPECT_EQ(parse_line([&] { read_ascii_columns(d.write("hdr", "a b c d\n1 2 3 4\n")); }), 1u);
  EXPECT_EQ(parse_line([&] { read_ascii_columns(d.write("ragged", "1 2\n3 4\n5\n")); }), 3u);
  EXPECT_EQ(parse_line([&] { read_ascii_columns(d.write("blank", "1 2\n\n3 4\n")); }), 2u);
  EXPECT_NE(parse_line([&] { read_ascii_columns(d.write("short", matrix_text(100, 4)), 20480); }), 0u);
}

TEST(Csv, SingleValue) {
  TempDir d;
  const auto r = load_csv_recording(d.write("one.csv", "0.0\n"), 97656.0);
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0], 0.0);
}

TEST(Csv, SixSecondTrial) {
  TempDir d;
  std::string text = "# trial\n";
  text.reserve(585936 * 5);
  for (std::size_t i = 0; i < 585936; ++i) text += (i % 2 ? "0.5\n" : "-1\n");
  const auto r = load_csv_recording(d.write("trial.csv", text), 97656.0);
  EXPECT_EQ(r.series.size(), 585936u);
  EXPECT_DOUBLE_EQ(r.series.duration(), 6.0);
}

TEST(Csv, NonNumericLineRejected) {
  TempDir d;
  EXPECT_EQ(parse_line([&] { load_csv_recording(d.write("bad.csv", "1\n2\nthree\n"), 1.0); }), 3u);
}

TEST(Ibf, EighteenRunsInOrder) {
  const double fs = 1000.0;
  std::vector<Recording> h, x;
  for (int i = 1; i <= 3; ++i) {
    h.push_back(constant(i, 6000, fs, Label::kHealthy, "h" + std::to_string(i)));
    x.push_back(constant(-i, 6000, fs, Label::kDefective, "d" + std::to_string(i)));
  }
  const auto runs = build_ibf_runs(h, x);
  ASSERT_EQ(runs.size(), 18u);
  std::size_t hh = 0, hd = 0;
  for (const auto& r : runs) {
    (r.kind == RunKind::kHealthyHealthy ? hh : hd) += 1;
    EXPECT_DOUBLE_EQ(r.duration(), 12.0);
    EXPECT_DOUBLE_EQ(*r.transition_time, 6.0);
  }
  EXPECT_EQ(hh, 9u);
  EXPECT_EQ(hd, 9u);
  EXPECT_EQ(runs[0].run_id, "h1-h1");
  EXPECT_EQ(runs[0].segments[0], runs[0].segments[1]);
  EXPECT_EQ(runs[3].run_id, "h1-d1");
  EXPECT_EQ(runs[17].run_id, "h3-d3");
  const auto s = runs[4].series();
  EXPECT_EQ(s[0], 1.0);
  EXPECT_EQ(s[6000], -2.0);
}

TEST(Ibf, WrongCountsRejected) {
  std::vector<Recording> h(2, constant(0, 10, 1.0, Label::kHealthy, "h"));
  std::vector<Recording> x(3, constant(0, 10, 1.0, Label::kDefective, "d"));
  EXPECT_THROW(build_ibf_runs(h, x), InputError);
}

TEST(R2f, SingleRecordingStream) {
  const auto s = build_r2f_stream({constant(0.1, 20480, 20000.0, Label::kUnknown, "f1")}, 1);
  EXPECT_EQ(s.n_recordings, 1u);
  EXPECT_DOUBLE_EQ(s.series.duration(), 1.024);
  EXPECT_EQ(s.recording_index(0.0), 1u);
  EXPECT_EQ(s.recording_index(1.0), 1u);
}

TEST(R2f, FullRunArithmetic) {
  R2fStream s;
  s.series = TimeSeries(20000.0, {0.0});
  s.samples_per_recording = 20480;
  s.n_recordings = kR2fRecordings;
  EXPECT_EQ(kR2fRecordings * s.samples_per_recording, 20152320u);
  EXPECT_DOUBLE_EQ(s.time_of_start(kR2fRecordings + 1), 1007.616);
  EXPECT_EQ(s.recording_index(1.5), 2u);
  EXPECT_EQ(s.recording_index(1.024), 2u);
  EXPECT_EQ(s.recording_index(1.0239), 1u);
}

TEST(R2f, DirectoryRoundTrip) {
  TempDir d;
  const std::size_t spr = 64;
  for (int k = 3; k >= 1; --k) d.write("2004.02.1" + std::to_string(k), matrix_text(spr, 4, 10.0 * k));
  d.write(".hidden", "junk\n");
  const auto files = list_r2f_files(d.path());
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "2004.02.11");
  const auto streams = load_r2f_dir(d.path(), {0, 1, 2, 3}, spr, 20000.0);
  ASSERT_EQ(streams.size(), 4u);
  EXPECT_EQ(streams[1].bearing_id, 2u);
  EXPECT_EQ(streams[1].series.size(), 3 * spr);
  EXPECT_DOUBLE_EQ(streams[1].series[spr], 21.0);
  EXPECT_DOUBLE_EQ(streams[3].series[2 * spr + 1], 33.001);
  const auto v = verify_r2f(d.path(), {0, 1, 2, 3}, spr, 20000.0, 3);
  EXPECT_TRUE(v.ok());
  EXPECT_FALSE(verify_r2f(d.path(), {0, 1, 2, 3}, spr, 20000.0, kR2fRecordings).ok());
}

TEST(Manifest, ChecksumsAndVerify) {
  TempDir d;
  std::string manifest;
  for (int i = 0; i < 6; ++i) {
    const std::string name = "t" + std::to_string(i) + ".csv";
    std::string text;
    for (int k = 0; k < 600; ++k) text += std::to_string(i + k * 1e-3) + "\n";
    const auto p = d.write(name, text);
    manifest += "[[recording]]\npath = \"" + name + "\"\nlabel = \"" + (i < 3 ? "healthy" : "defective") +
                "\"\nsample_rate_hz = 100.0\nsha256 = \"" + sha256_file(p) + "\"\n";
  }
  const auto m = d.write("manifest.toml", manifest);
  const auto entries = load_manifest(m);
  ASSERT_EQ(entries.size(), 6u);
  EXPECT_EQ(entries[4].label, Label::kDefective);
  EXPECT_EQ(entries[0].path, d.path() / "t0.csv");
  const auto set = load_ibf(m);
  EXPECT_EQ(set.healthy.size(), 3u);
  EXPECT_EQ(set.defective.size(), 3u);
  // Counts and checksums pass; the rate and length checks want the real rig.
  const auto rep = verify_ibf(m);
  EXPECT_FALSE(rep.ok());
  for (const auto& c : rep.checks) {
    if (c.name == "counts" || c.name.rfind("sha256", 0) == 0) EXPECT_TRUE(c.ok) << c.name;
    if (c.name.rfind("rate", 0) == 0) EXPECT_FALSE(c.ok) << c.name;
  }

  d.write("t5.csv", "1\n");
  EXPECT_THROW(load_ibf(m), InputError);
}

TEST(Manifest, FullSizeSetVerifies) {
  TempDir d;
  std::string body;
  body.reserve(585936 * 2);
  for (std::size_t k = 0; k < 585936; ++k) body += "0\n";
  std::string manifest;
  for (int i = 0; i < 6; ++i) {
    const std::string name = "trial" + std::to_string(i) + ".csv";
    d.write(name, body);
    manifest += "[[recording]]\npath = \"" + name + "\"\nlabel = \"" + (i % 2 ? "defective" : "healthy") +
                "\"\nsample_rate_hz = 97656.0\n";
  }
  const auto rep = verify_ibf(d.write("m.toml", manifest));
  for (const auto& c : rep.checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
  EXPECT_TRUE(rep.ok());
}

TEST(Sha256, KnownDigest) {
  TempDir d;
  EXPECT_EQ(sha256_file(d.write("abc", "abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Labels, ParseAndPrint) {
  EXPECT_EQ(parse_label("Healthy"), Label::kHealthy);
  EXPECT_EQ(parse_label("DEFECTIVE"), Label::kDefective);
  EXPECT_STREQ(to_string(Label::kUnknown), "unknown");
  EXPECT_THROW(parse_label("broken"), InputError);
}
