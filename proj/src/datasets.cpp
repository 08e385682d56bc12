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

#include "spikevib/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "spikevib/error.hpp"

namespace spikevib::datasets {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; }

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// Calls fn(line_number, line) for each line; trailing blank lines are
// dropped, interior blank lines are an error.
template <typename Fn>
void for_each_line(const std::string& text, const std::string& source, Fn&& fn) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t pos = 0;
  std::size_t no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    lines.emplace_back(++no, std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
  }
  while (!lines.empty() && blank(lines.back().second)) lines.pop_back();
  for (const auto& [n, line] : lines) {
    if (blank(line)) throw ParseError(source, n, "blank line");
    fn(n, line);
  }
}

double parse_number(std::string_view tok, const std::string& source, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(source, line, "not a number: '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value");
  return v;
}

std::size_t samples_for(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

}  // namespace

const char* to_string(Label label) noexcept {
  switch (label) {
    case Label::kHealthy: return "healthy";
    case Label::kDefective: return "defective";
    case Label::kUnknown: break;
  }
  return "unknown";
}

Label parse_label(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "healthy") return Label::kHealthy;
  if (s == "defective") return Label::kDefective;
  if (s == "unknown") return Label::kUnknown;
  throw InputError("unknown label '" + text + "'");
}

std::vector<std::vector<double>> read_ascii_columns(const fs::path& path,
                                                    std::size_t expected_rows) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  std::vector<std::vector<double>> cols;
  std::size_t rows = 0;
  for_each_line(text, source, [&](std::size_t no, std::string_view line) {
    std::size_t c = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      const double v = parse_number(line.substr(i, j - i), source, no);
      if (rows == 0) {
        cols.emplace_back();
        if (expected_rows) cols.back().reserve(expected_rows);
      } else if (c >= cols.size()) {
        throw ParseError(source, no, "expected " + std::to_string(cols.size()) + " columns");
      }
      cols[c].push_back(v);
      ++c;
      i = j;
    }
    if (c != cols.size()) {
      throw ParseError(source, no,
                       "expected " + std::to_string(cols.size()) + " columns, got " + std::to_string(c));
    }
    ++rows;
  });
  if (rows == 0) throw ParseError(source, 1, "empty file");
  if (expected_rows && rows != expected_rows) {
    throw ParseError(source, rows + 1,
                     "expected " + std::to_string(expected_rows) + " rows, got " + std::to_string(rows));
  }
  return cols;
}

Recording load_ascii_matrix(const fs::path& path, std::size_t column, double sample_rate,
                            std::size_t expected_rows) {
  auto cols = read_ascii_columns(path, expected_rows);
  if (column >= cols.size()) {
    throw InputError(path.string() + ": column " + std::to_string(column) + " out of range (" +
                     std::to_string(cols.size()) + " columns)");
  }
  return {TimeSeries(sample_rate, std::move(cols[column])), path.string(), Label::kUnknown};
}

Recording load_csv_recording(const fs::path& path, double sample_rate) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  std::vector<double> x;
  for_each_line(text, source, [&](std::size_t no, std::string_view line) {
    if (line.front() == '#') return;
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    x.push_back(parse_number(line, source, no));
  });
  if (x.empty()) throw ParseError(source, 1, "no samples");
  return {TimeSeries(sample_rate, std::move(x)), source, Label::kUnknown};
}

const char* to_string(RunKind kind) noexcept {
  return kind == RunKind::kHealthyHealthy ? "healthy-healthy" : "healthy-defective";
}

TimeSeries RunSpec::series() const {
  if (segments.empty()) throw InputError("run " + run_id + " has no segments");
  std::vector<double> x;
  for (const auto& s : segments) {
    if (s->series.sample_rate() != segments.front()->series.sample_rate()) {
      throw InputError("run " + run_id + ": segments differ in sample rate");
    }
    x.insert(x.end(), s->series.samples().begin(), s->series.samples().end());
  }
  return TimeSeries(segments.front()->series.sample_rate(), std::move(x));
}

double RunSpec::duration() const {
  double d = 0.0;
  for (const auto& s : segments) d += s->series.duration();
  return d;
}

double RunSpec::sample_rate() const {
  return segments.empty() ? 0.0 : segments.front()->series.sample_rate();
}

std::vector<RunSpec> build_ibf_runs(const std::vector<Recording>& healthy,
                                    const std::vector<Recording>& defective) {
  if (healthy.size() != 3 || defective.size() != 3) {
    throw InputError("IBF runs need 3 healthy and 3 defective recordings, got " +
                     std::to_string(healthy.size()) + " and " + std::to_string(defective.size()));
  }
  std::vector<std::shared_ptr<const Recording>> h;
  std::vector<std::shared_ptr<const Recording>> partners;
  for (const auto& r : healthy) h.push_back(std::make_shared<const Recording>(r));
  partners = h;
  for (const auto& r : defective) partners.push_back(std::make_shared<const Recording>(r));
  const double rate = h.front()->series.sample_rate();
  for (const auto& p : partners) {
    if (p->series.sample_rate() != rate) throw InputError("IBF recordings differ in sample rate");
  }

  std::vector<RunSpec> runs;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < partners.size(); ++j) {
      RunSpec r;
      r.segments = {h[i], partners[j]};
      r.transition_time = h[i]->series.duration();
      r.kind = j < h.size() ? RunKind::kHealthyHealthy : RunKind::kHealthyDefective;
      r.run_id = "h" + std::to_string(i + 1) + "-" +
                 (j < h.size() ? "h" + std::to_string(j + 1) : "d" + std::to_string(j - h.size() + 1));
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

std::size_t R2fStream::recording_index(double t) const {
  const double s = t * series.sample_rate();
  const double r = std::round(s);
  // Snap times that are a representation error away from a sample boundary.
  const double idx = std::abs(s - r) <= 1e-6 ? r : std::floor(s);
  return static_cast<std::size_t>(idx) / samples_per_recording + 1;
}

double R2fStream::time_of_start(std::size_t k) const {
  return static_cast<double>((k - 1) * samples_per_recording) / series.sample_rate();
}

R2fStream build_r2f_stream(const std::vector<Recording>& recordings, std::size_t bearing,
                           std::size_t samples_per_recording, double sample_rate) {
  if (recordings.empty()) throw InputError("R2F stream needs at least one recording");
  R2fStream s;
  s.bearing_id = bearing;
  s.samples_per_recording = samples_per_recording;
  s.n_recordings = recordings.size();
  std::vector<double> x;
  x.reserve(recordings.size() * samples_per_recording);
  for (const auto& r : recordings) {
    if (r.series.size() != samples_per_recording || r.series.sample_rate() != sample_rate) {
      throw InputError(r.source_id + ": expected " + std::to_string(samples_per_recording) +
                       " samples at " + std::to_string(sample_rate) + " Hz, got " +
                       std::to_string(r.series.size()) + " at " +
                       std::to_string(r.series.sample_rate()) + " Hz");
    }
    x.insert(x.end(), r.series.samples().begin(), r.series.samples().end());
    s.sources.push_back(r.source_id);
  }
  s.series = TimeSeries(sample_rate, std::move(x));
  return s;
}

std::vector<fs::path> list_r2f_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

std::vector<R2fStream> load_r2f_dir(const fs::path& dir, const std::vector<std::size_t>& columns,
                                    std::size_t samples_per_recording, double sample_rate) {
  const auto files = list_r2f_files(dir);
  if (files.empty()) throw InputError(dir.string() + ": no recordings");
  std::vector<std::vector<double>> data(columns.size());
  for (auto& d : data) d.reserve(files.size() * samples_per_recording);
  std::vector<std::string> sources;
  for (const auto& f : files) {
    const auto cols = read_ascii_columns(f, samples_per_recording);
    for (std::size_t b = 0; b < columns.size(); ++b) {
      if (columns[b] >= cols.size()) {
        throw InputError(f.string() + ": column " + std::to_string(columns[b]) + " out of range");
      }
      data[b].insert(data[b].end(), cols[columns[b]].begin(), cols[columns[b]].end());
    }
    sources.push_back(f.filename().string());
  }
  std::vector<R2fStream> out;
  for (std::size_t b = 0; b < columns.size(); ++b) {
    R2fStream s;
    s.bearing_id = b + 1;
    s.samples_per_recording = samples_per_recording;
    s.n_recordings = files.size();
    s.sources = sources;
    s.series = TimeSeries(sample_rate, std::move(data[b]));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  toml::table root;
  try {
    root = toml::parse(text, path.string());
  } catch (const toml::parse_error& e) {
    throw ParseError(path.string(), e.source().begin.line, std::string(e.description()));
  }
  const auto* arr = root["recording"].as_array();
  if (arr == nullptr) throw InputError(path.string() + ": no [[recording]] entries");
  for (const auto& [k, v] : root) {
    (void)v;
    if (k != "recording") throw InputError(path.string() + ": unknown key " + std::string(k.str()));
  }
  std::vector<ManifestEntry> out;
  const fs::path base = path.parent_path();
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto* t = arr->get(i)->as_table();
    const std::string where = path.string() + ": recording " + std::to_string(i + 1);
    if (t == nullptr) throw InputError(where + " is not a table");
    ManifestEntry e;
    const auto p = (*t)["path"].value<std::string>();
    const auto label = (*t)["label"].value<std::string>();
    const auto rate = (*t)["sample_rate_hz"].value<double>();
    if (!p || !label || !rate) throw InputError(where + " needs path, label and sample_rate_hz");
    for (const auto& [k, v] : *t) {
      (void)v;
      if (k != "path" && k != "label" && k != "sample_rate_hz" && k != "sha256") {
        throw InputError(where + ": unknown key " + std::string(k.str()));
      }
    }
    e.path = fs::path(*p).is_absolute() ? fs::path(*p) : base / *p;
    e.label = parse_label(*label);
    e.sample_rate_hz = *rate;
    if (!(e.sample_rate_hz > 0.0)) throw InputError(where + ": sample_rate_hz must be positive");
    if (auto h = (*t)["sha256"].value<std::string>()) e.sha256 = *h;
    out.push_back(std::move(e));
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw InputError("sha256: digest init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

IbfSet load_ibf(const fs::path& manifest) {
  IbfSet set;
  for (const auto& e : load_manifest(manifest)) {
    if (e.sha256) {
      const std::string got = sha256_file(e.path);
      if (got != *e.sha256) {
        throw InputError(e.path.string() + ": sha256 mismatch (expected " + *e.sha256 + ", got " + got + ")");
      }
    }
    Recording r = load_csv_recording(e.path, e.sample_rate_hz);
    r.label = e.label;
    if (e.label == Label::kHealthy) {
      set.healthy.push_back(std::move(r));
    } else if (e.label == Label::kDefective) {
      set.defective.push_back(std::move(r));
    } else {
      throw InputError(e.path.string() + ": IBF recordings must be healthy or defective");
    }
  }
  return set;
}

bool VerifyReport::ok() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

VerifyReport verify_ibf(const fs::path& manifest) {
  VerifyReport rep;
  std::vector<ManifestEntry> entries;
  try {
    entries = load_manifest(manifest);
  } catch (const Error& e) {
    rep.checks.push_back({"manifest", false, e.what()});
    return rep;
  }
  std::size_t n_h = 0;
  std::size_t n_d = 0;
  for (const auto& e : entries) {
    n_h += e.label == Label::kHealthy;
    n_d += e.label == Label::kDefective;
  }
  rep.checks.push_back({"counts", n_h == 3 && n_d == 3,
                        std::to_string(n_h) + " healthy, " + std::to_string(n_d) + " defective (want 3 + 3)"});

  std::vector<Recording> healthy;
  std::vector<Recording> defective;
  bool all_loaded = true;
  for (const auto& e : entries) {
    const std::string name = e.path.filename().string();
    if (e.sha256) {
      try {
        const std::string got = sha256_file(e.path);
        rep.checks.push_back({"sha256 " + name, got == *e.sha256, got});
      } catch (const Error& err) {
        rep.checks.push_back({"sha256 " + name, false, err.what()});
      }
    }
    rep.checks.push_back({"rate " + name, e.sample_rate_hz == 97656.0,
                          std::to_string(e.sample_rate_hz) + " Hz"});
    try {
      Recording r = load_csv_recording(e.path, e.sample_rate_hz);
      r.label = e.label;
      const std::size_t want = samples_for(kIbfTrialSeconds, e.sample_rate_hz);
      const std::size_t got = r.series.size();
      const bool ok = got + 1 >= want && got <= want + 1;
      rep.checks.push_back({"length " + name, ok,
                            std::to_string(got) + " samples (want " + std::to_string(want) + " +-1)"});
      (e.label == Label::kHealthy ? healthy : defective).push_back(std::move(r));
    } catch (const Error& err) {
      all_loaded = false;
      rep.checks.push_back({"load " + name, false, err.what()});
    }
  }
  if (all_loaded && healthy.size() == 3 && defective.size() == 3) {
    try {
      const auto runs = build_ibf_runs(healthy, defective);
      bool ok = runs.size() == 18;
      for (const auto& r : runs) {
        const double want = 2.0 * kIbfTrialSeconds;
        ok = ok && std::abs(r.duration() - want) <= 2.0 / r.sample_rate();
      }
      rep.checks.push_back({"runs", ok, std::to_string(runs.size()) + " runs of 12 s"});
    } catch (const Error& err) {
      rep.checks.push_back({"runs", false, err.what()});
    }
  } else {
    rep.checks.push_back({"runs", false, "runs not built"});
  }
  return rep;
}

VerifyReport verify_r2f(const fs::path& dir, const std::vector<std::size_t>& columns,
                        std::size_t samples_per_recording, double sample_rate,
                        std::size_t expected_recordings) {
  VerifyReport rep;
  std::vector<fs::path> files;
  try {
    files = list_r2f_files(dir);
  } catch (const Error& e) {
    rep.checks.push_back({"directory", false, e.what()});
    return rep;
  }
  rep.checks.push_back({"file count", files.size() == expected_recordings,
                        std::to_string(files.size()) + " files (want " +
                            std::to_string(expected_recordings) + ")"});
  std::size_t total = 0;
  std::size_t bad = 0;
  std::string first_error;
  for (const auto& f : files) {
    try {
      const auto cols = read_ascii_columns(f, samples_per_recording);
      const bool cols_ok = std::all_of(columns.begin(), columns.end(),
                                       [&](std::size_t c) { return c < cols.size(); });
      if (!cols_ok) throw InputError(f.string() + ": missing sensor column");
      total += cols.front().size();
    } catch (const Error& e) {
      ++bad;
      if (first_error.empty()) first_error = e.what();
    }
  }
  rep.checks.push_back({"file shape", bad == 0,
                        bad == 0 ? "all files have " + std::to_string(samples_per_recording) + " rows"
                                 : std::to_string(bad) + " bad files; first: " + first_error});
  const std::size_t want = expected_recordings * samples_per_recording;
  char dur[64];
  std::snprintf(dur, sizeof dur, "%.3f s", static_cast<double>(total) / sample_rate);
  rep.checks.push_back({"stream length", total == want,
                        std::to_string(total) + " samples, " + dur + " (want " + std::to_string(want) + ")"});
  return rep;
}

}  // namespace spikevib::datasets
