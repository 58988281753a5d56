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

#include "stim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

#include "stim/dataset.hpp"
#include "stim/error.hpp"

namespace stim {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double to_real(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw FormatError(field, "'" + s + "' is not a number");
  return v;
}

struct Row {
  std::string name;
  std::size_t samples;
  double two_afc;
  std::map<std::size_t, double> rrf;
};

std::vector<Row> rows_of(const EvalReport& r) {
  std::vector<Row> rows;
  std::size_t total = 0;
  for (const auto& [name, c] : r.per_category) {
    rows.push_back({name, c.samples, c.two_afc, c.rrf});
    total += c.samples;
  }
  rows.push_back({"overall", total, r.two_afc, r.rrf});
  return rows;
}

}  // namespace

std::string six_digits(double v) { return fmt("%.6g", v); }

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::table;
  if (name == "csv") return ReportFormat::csv;
  throw InvalidArgument("unknown report format '" + std::string(name) + "' (table or csv)");
}

std::string format_report(const EvalReport& report, ReportFormat format) {
  const std::vector<Row> rows = rows_of(report);
  std::vector<std::string> header{"category", "samples", "2afc"};
  for (const auto& [k, v] : report.rrf) header.push_back("rrf_k" + std::to_string(k));

  std::vector<std::vector<std::string>> cells;
  const char* spec = format == ReportFormat::table ? "%.6g" : "%.17g";
  for (const auto& row : rows) {
    std::vector<std::string> line{row.name, std::to_string(row.samples), fmt(spec, row.two_afc)};
    for (const auto& [k, v] : report.rrf) {
      const auto it = row.rrf.find(k);
      line.push_back(it == row.rrf.end() ? "" : fmt(spec, it->second));
    }
    cells.push_back(std::move(line));
  }

  std::ostringstream out;
  if (format == ReportFormat::csv) {
    auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
      out << '\n';
    };
    emit(header);
    for (const auto& line : cells) emit(line);
    if (report.jnd_map) out << "jnd_map,,," << fmt(spec, *report.jnd_map) << '\n';
    return out.str();
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i == 0) {
        out << line[i] << std::string(width[i] - line[i].size(), ' ');
      } else {
        out << "  " << std::string(width[i] - line[i].size(), ' ') << line[i];
      }
    }
    out << '\n';
  };
  emit(header);
  for (const auto& line : cells) emit(line);
  if (report.jnd_map) out << "jnd mAP " << fmt(spec, *report.jnd_map) << '\n';
  return out.str();
}

EvalReport parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw FormatError("header", "empty report");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "category" || header[1] != "samples" || header[2] != "2afc")
    throw FormatError("header", "not a report header: '" + line + "'");
  std::vector<std::size_t> ks;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i].rfind("rrf_k", 0) != 0) throw FormatError("header", "bad column " + header[i]);
    ks.push_back(static_cast<std::size_t>(std::stoul(header[i].substr(5))));
  }
  EvalReport report;
  bool overall = false;
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const std::string field = "row " + std::to_string(row);
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() == 4 && f[0] == "jnd_map") {
      report.jnd_map = to_real(f[3], field);
      continue;
    }
    if (f.size() != header.size()) throw FormatError(field, "wrong field count");
    CategoryReport c;
    c.samples = static_cast<std::size_t>(to_real(f[1], field));
    c.two_afc = to_real(f[2], field);
    for (std::size_t i = 0; i < ks.size(); ++i) c.rrf[ks[i]] = to_real(f[3 + i], field);
    if (f[0] == "overall") {
      report.two_afc = c.two_afc;
      report.rrf = c.rrf;
      overall = true;
    } else {
      report.per_category[f[0]] = c;
    }
  }
  if (!overall) throw FormatError("overall", "missing overall row");
  return report;
}

}  // namespace stim
