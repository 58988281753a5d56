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

#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "stim/dataset.hpp"
#include "stim/error.hpp"
#include "stim/report.hpp"

namespace stim {
namespace {

namespace fs = std::filesystem;

std::string field_of(const std::string& text) {
  try {
    parse_triplet_manifest(text, "/data");
  } catch (const FormatError& e) {
    return e.field();
  }
  return "";
}

TEST(TripletManifest, ParsesRowsAndResolvesPaths) {
  const std::string text =
      "sample_id,category,ref,p0,p1,h\r\n"
      "s1,blur,r.ppm,a.ppm,b.ppm,0.75\n"
      "s2,noise,/abs/r.ppm,x/a.ppm,x/b.ppm,1\n";
  const auto rows = parse_triplet_manifest(text, "/data");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].sample_id, "s1");
  EXPECT_EQ(rows[0].category, "blur");
  EXPECT_EQ(rows[0].ref, fs::path("/data/r.ppm"));
  EXPECT_EQ(rows[0].h, 0.75);
  EXPECT_EQ(rows[1].ref, fs::path("/abs/r.ppm"));
  EXPECT_EQ(rows[1].p0, fs::path("/data/x/a.ppm"));
}

TEST(TripletManifest, ErrorsNameTheRow) {
  const std::string head = "sample_id,category,ref,p0,p1,h\n";
  EXPECT_EQ(field_of(head + "a,c,r,p,q,0.5\nb,c,r,p,q,1.5\n"), "row 2");
  EXPECT_EQ(field_of(head + "a,c,r,p,q,0.5\na,c,r,p,q,0.1\n"), "row 2");
  EXPECT_EQ(field_of(head + "a,c,r,p,q,-0.1\n"), "row 1");
  EXPECT_EQ(field_of(head + "a,c,r,p,q,abc\n"), "row 1");
  EXPECT_EQ(field_of(head + "a,c,r,p,0.5\n"), "row 1");
  EXPECT_EQ(field_of(head + "a,,r,p,q,0.5\n"), "row 1");
  EXPECT_EQ(field_of("id,category,ref,p0,p1,h\n"), "header");
  EXPECT_EQ(field_of(""), "header");
}

TEST(JndManifest, ParsesLabels) {
  const auto rows = parse_jnd_manifest("pair_id,img_a,img_b,same\np,a,b,1\nq,a,c,false\n", "d");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].same);
  EXPECT_FALSE(rows[1].same);
  EXPECT_EQ(rows[1].img_b, fs::path("d/c"));
  EXPECT_THROW(parse_jnd_manifest("pair_id,img_a,img_b,same\np,a,b,maybe\n", "d"), FormatError);
  EXPECT_THROW(parse_jnd_manifest("pair_id,img_a,img_b,same\np,a,b,1\np,a,b,0\n", "d"), FormatError);
}

TEST(SyntheticDataset, WritesAndReloadsExactly) {
  const auto dir = fs::temp_directory_path() / "stim_dataset_test";
  fs::remove_all(dir);
  const auto data = synth_dataset(3, 6, 16);
  write_triplet_dataset(data, dir);
  const auto back = load_triplets(read_triplet_manifest(dir / "manifest.csv"));
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].id, data[i].id);
    EXPECT_EQ(back[i].category, data[i].category);
    EXPECT_EQ(back[i].sample.h, data[i].sample.h);
    EXPECT_EQ(back[i].sample.ref, data[i].sample.ref);
    EXPECT_EQ(back[i].sample.p0, data[i].sample.p0);
    EXPECT_EQ(back[i].sample.p1, data[i].sample.p1);
  }
  fs::remove_all(dir);
}

TEST(ScoresCsv, RoundTripsExactly) {
  Rng rng(4);
  std::vector<SampleScores> scores(5);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& s = scores[i];
    s.id = "s" + std::to_string(i);
    s.category = i % 2 ? "odd" : "even";
    s.h = rng.uniform();
    s.s1 = rng.uniform();
    s.s2 = rng.uniform();
    s.s1_crop = rng.uniform();
    s.s2_crop = rng.uniform();
    for (std::size_t k = 1; k <= 3; ++k) s.shifted[k] = {rng.uniform(), rng.uniform()};
  }
  const auto back = parse_scores_csv(format_scores_csv(scores));
  ASSERT_EQ(back.size(), scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(back[i].id, scores[i].id);
    EXPECT_EQ(back[i].h, scores[i].h);
    EXPECT_EQ(back[i].s1, scores[i].s1);
    EXPECT_EQ(back[i].s2_crop, scores[i].s2_crop);
    EXPECT_EQ(back[i].shifted, scores[i].shifted);
  }
  EXPECT_THROW(parse_scores_csv("sample_id,category,h,s1\n"), FormatError);
}

EvalReport random_report(Rng& rng) {
  EvalReport r;
  for (const char* name : {"blur", "noise", "shuffle"}) {
    CategoryReport c;
    c.samples = 1 + rng.below(100);
    c.two_afc = 100.0 * rng.uniform();
    for (std::size_t k = 1; k <= 3; ++k) c.rrf[k] = 100.0 * rng.uniform() / 7.0;
    r.per_category[name] = c;
  }
  r.two_afc = 100.0 * rng.uniform();
  for (std::size_t k = 1; k <= 3; ++k) r.rrf[k] = 100.0 * rng.uniform() / 3.0;
  if (rng.below(2)) r.jnd_map = rng.uniform();
  return r;
}

TEST(ReportFormat, CsvReparsesToTableValues) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const EvalReport r = random_report(rng);
    const std::string table = format_report(r, ReportFormat::table);
    const EvalReport parsed = parse_report_csv(format_report(r, ReportFormat::csv));
    EXPECT_EQ(parsed.two_afc, r.two_afc);
    EXPECT_EQ(parsed.rrf, r.rrf);
    EXPECT_EQ(parsed.jnd_map, r.jnd_map);
    // Every value the table shows is the CSV value at six significant digits.
    EXPECT_NE(table.find(six_digits(parsed.two_afc)), std::string::npos);
    for (const auto& [name, c] : parsed.per_category) {
      EXPECT_EQ(c.two_afc, r.per_category.at(name).two_afc);
      const auto line_at = table.find(name);
      ASSERT_NE(line_at, std::string::npos);
      const std::string line = table.substr(line_at, table.find('\n', line_at) - line_at);
      EXPECT_NE(line.find(six_digits(c.two_afc)), std::string::npos) << line;
      for (const auto& [k, v] : c.rrf) EXPECT_NE(line.find(six_digits(v)), std::string::npos) << line;
    }
  }
}

TEST(ReportFormat, TableHasHeaderAndOverallRow) {
  Rng rng(2);
  const std::string table = format_report(random_report(rng), ReportFormat::table);
  EXPECT_EQ(table.rfind("category", 0), 0u);
  EXPECT_NE(table.find("rrf_k3"), std::string::npos);
  EXPECT_NE(table.find("\noverall"), std::string::npos);
  EXPECT_THROW(parse_report_format("xml"), InvalidArgument);
}

}  // namespace
}  // namespace stim
