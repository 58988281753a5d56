// Copyright 2026 The stim Authors.
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

#include "stim/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "stim/error.hpp"
#include "stim/image.hpp"

namespace stim {
namespace {

// Lines of `text` with CR stripped; blank trailing lines dropped.
std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string row_name(std::size_t row) { return "row " + std::to_string(row); }

double parse_real(const std::string& s, const std::string& field, const char* what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last)
    throw FormatError(field, std::string(what) + " '" + s + "' is not a number");
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& field) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(field, "'" + s + "' is not a non-negative integer");
  return v;
}

std::vector<std::vector<std::string>> table(std::string_view text, std::string_view header,
                                            std::size_t columns) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw FormatError("header", "empty manifest");
  if (lines.front() != header)
    throw FormatError("header", "expected '" + std::string(header) + "', got '" + lines.front() + "'");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields = split_csv_line(lines[i]);
    if (fields.size() != columns)
      throw FormatError(row_name(i), "expected " + std::to_string(columns) + " fields, got " +
                                         std::to_string(fields.size()));
    rows.push_back(std::move(fields));
  }
  return rows;
}

void check_unique(std::set<std::string>& seen, const std::string& id, std::size_t row) {
  if (id.empty()) throw FormatError(row_name(row), "empty id");
  if (!seen.insert(id).second) throw FormatError(row_name(row), "duplicate id '" + id + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<TripletRow> parse_triplet_manifest(std::string_view text,
                                               const std::filesystem::path& base_dir) {
  std::vector<TripletRow> out;
  std::set<std::string> seen;
  const auto rows = table(text, kTripletHeader, 6);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t row = i + 1;
    check_unique(seen, f[0], row);
    if (f[1].empty()) throw FormatError(row_name(row), "empty category");
    TripletRow r;
    r.sample_id = f[0];
    r.category = f[1];
    r.ref = resolve(base_dir, f[2]);
    r.p0 = resolve(base_dir, f[3]);
    r.p1 = resolve(base_dir, f[4]);
    r.h = parse_real(f[5], row_name(row), "h");
    if (!(r.h >= 0.0 && r.h <= 1.0)) throw FormatError(row_name(row), "h=" + f[5] + " outside [0, 1]");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<JndRow> parse_jnd_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<JndRow> out;
  std::set<std::string> seen;
  const auto rows = table(text, kJndHeader, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t row = i + 1;
    check_unique(seen, f[0], row);
    JndRow r;
    r.pair_id = f[0];
    r.img_a = resolve(base_dir, f[1]);
    r.img_b = resolve(base_dir, f[2]);
    if (f[3] == "1" || f[3] == "true") {
      r.same = true;
    } else if (f[3] == "0" || f[3] == "false") {
      r.same = false;
    } else {
      throw FormatError(row_name(row), "same must be 1/0/true/false, got '" + f[3] + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<TripletRow> read_triplet_manifest(const std::filesystem::path& path) {
  return parse_triplet_manifest(read_text(path), path.parent_path());
}

std::vector<JndRow> read_jnd_manifest(const std::filesystem::path& path) {
  return parse_jnd_manifest(read_text(path), path.parent_path());
}

std::vector<LabeledTriplet> load_triplets(const std::vector<TripletRow>& rows) {
  std::vector<LabeledTriplet> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    LabeledTriplet t;
    t.id = r.sample_id;
    t.category = r.category;
    t.sample.ref = decode_image(r.ref);
    t.sample.p0 = decode_image(r.p0);
    t.sample.p1 = decode_image(r.p1);
    t.sample.h = r.h;
    out.push_back(std::move(t));
  }
  return out;
}

void write_triplet_dataset(const std::vector<LabeledTriplet>& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  std::ostringstream manifest;
  manifest << kTripletHeader << '\n';
  for (const auto& t : data) {
    const std::string stem = "images/" + t.id;
    write_ppm(t.sample.ref, dir / (stem + "_ref.ppm"));
    write_ppm(t.sample.p0, dir / (stem + "_p0.ppm"));
    write_ppm(t.sample.p1, dir / (stem + "_p1.ppm"));
    manifest << t.id << ',' << t.category << ',' << stem << "_ref.ppm," << stem << "_p0.ppm,"
             << stem << "_p1.ppm," << fmt17(t.sample.h) << '\n';
  }
  write_text(manifest.str(), dir / "manifest.csv");
}

std::string format_scores_csv(const std::vector<SampleScores>& scores) {
  std::ostringstream out;
  out << "sample_id,category,h,s1,s2,s1_crop,s2_crop";
  if (!scores.empty())
    for (const auto& [k, v] : scores.front().shifted) out << ",s1_k" << k << ",s2_k" << k;
  out << '\n';
  for (const auto& s : scores) {
    out << s.id << ',' << s.category << ',' << fmt17(s.h) << ',' << fmt17(s.s1) << ',' << fmt17(s.s2)
        << ',' << fmt17(s.s1_crop) << ',' << fmt17(s.s2_crop);
    for (const auto& [k, v] : s.shifted) out << ',' << fmt17(v.first) << ',' << fmt17(v.second);
    out << '\n';
  }
  return out.str();
}

std::vector<SampleScores> parse_scores_csv(std::string_view text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw FormatError("header", "empty scores file");
  const std::vector<std::string> head = split_csv_line(lines.front());
  static const char* fixed[] = {"sample_id", "category", "h", "s1", "s2", "s1_crop", "s2_crop"};
  if (head.size() < 7 || (head.size() - 7) % 2 != 0)
    throw FormatError("header", "unexpected column layout '" + lines.front() + "'");
  for (std::size_t i = 0; i < 7; ++i)
    if (head[i] != fixed[i]) throw FormatError("header", "column " + std::to_string(i + 1) + " must be " + fixed[i]);
  std::vector<std::size_t> ks;
  for (std::size_t i = 7; i < head.size(); i += 2) {
    const auto a = head[i], b = head[i + 1];
    if (a.rfind("s1_k", 0) != 0 || b.rfind("s2_k", 0) != 0 || a.substr(4) != b.substr(4))
      throw FormatError("header", "bad shift columns '" + a + "," + b + "'");
    ks.push_back(parse_count(a.substr(4), "header"));
  }
  std::vector<SampleScores> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string row = row_name(i);
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != head.size())
      throw FormatError(row, "expected " + std::to_string(head.size()) + " fields");
    check_unique(seen, f[0], i);
    SampleScores s;
    s.id = f[0];
    s.category = f[1];
    if (s.category.empty()) throw FormatError(row, "empty category");
    s.h = parse_real(f[2], row, "h");
    if (!(s.h >= 0.0 && s.h <= 1.0)) throw FormatError(row, "h=" + f[2] + " outside [0, 1]");
    s.s1 = parse_real(f[3], row, "s1");
    s.s2 = parse_real(f[4], row, "s2");
    s.s1_crop = parse_real(f[5], row, "s1_crop");
    s.s2_crop = parse_real(f[6], row, "s2_crop");
    for (std::size_t j = 0; j < ks.size(); ++j)
      s.shifted[ks[j]] = {parse_real(f[7 + 2 * j], row, "s1_k"), parse_real(f[8 + 2 * j], row, "s2_k")};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace stim
