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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stim/eval.hpp"

// CSV manifests and score tables. Files are UTF-8 with a header row and LF
// line endings (a trailing CR is tolerated). Fields may not contain commas.
// Image paths are resolved relative to the manifest's directory.
//
//   triplets: sample_id,category,ref,p0,p1,h
//   jnd:      pair_id,img_a,img_b,same      (same is 1/0, true/false)

namespace stim {

struct TripletRow {
  std::string sample_id;
  std::string category;
  std::filesystem::path ref, p0, p1;
  double h = 0.5;
};

struct JndRow {
  std::string pair_id;
  std::filesystem::path img_a, img_b;
  bool same = false;
};

inline constexpr std::string_view kTripletHeader = "sample_id,category,ref,p0,p1,h";
inline constexpr std::string_view kJndHeader = "pair_id,img_a,img_b,same";

/// Errors are FormatError with field "row N" (data rows count from 1) or "header".
std::vector<TripletRow> parse_triplet_manifest(std::string_view text,
                                               const std::filesystem::path& base_dir);
std::vector<JndRow> parse_jnd_manifest(std::string_view text, const std::filesystem::path& base_dir);

std::vector<TripletRow> read_triplet_manifest(const std::filesystem::path& path);
std::vector<JndRow> read_jnd_manifest(const std::filesystem::path& path);

/// Decodes every image referenced by the rows.
std::vector<LabeledTriplet> load_triplets(const std::vector<TripletRow>& rows);

/// Writes images as PPM under dir and a manifest.csv referencing them.
void write_triplet_dataset(const std::vector<LabeledTriplet>& data, const std::filesystem::path& dir);

/// sample_id,category,h,s1,s2,s1_crop,s2_crop[,s1_k{k},s2_k{k}]...
std::string format_scores_csv(const std::vector<SampleScores>& scores);
std::vector<SampleScores> parse_scores_csv(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

/// Splits a CSV line on commas; no quoting.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace stim
