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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stim/backbone.hpp"
#include "stim/metric.hpp"
#include "stim/random.hpp"

// Shift-tolerance evaluation. Scores are distances: lower means more similar.

namespace stim {

/// Columns removed by the shift crop, independent of the shift amount.
inline constexpr std::size_t kShiftCropMargin = 3;
inline constexpr std::size_t kMaxShift = 3;

struct LabeledTriplet {
  std::string id;
  std::string category;
  TripletSample sample;
};

struct ShiftedSample {
  TripletSample original;  // every image cropped to columns [0, w-3)
  TripletSample shifted;   // reference as above; distortions cropped to [k, w+k-3)
  std::size_t k = 0;
};

ShiftedSample shift_crop(const TripletSample& sample, std::size_t k);

/// (s1, s2) on the original sample and the same pair after the shift.
struct RankScores {
  double s1 = 0.0;
  double s2 = 0.0;
  double s1_shifted = 0.0;
  double s2_shifted = 0.0;
};

bool rank_flipped(const RankScores& r);
/// Percentage of samples whose (s1 < s2) decision changes under the shift.
double rank_flip_rate(std::span<const RankScores> scores);

struct AfcScore {
  double s1 = 0.0;
  double s2 = 0.0;
  double h = 0.5;
};

/// h when the metric prefers p1, 1 - h when it prefers p0, 0.5 on a tie.
double two_afc_credit(const AfcScore& score);
/// Mean credit as a percentage.
double two_afc(std::span<const AfcScore> scores);

struct CategoryAverage {
  std::map<std::string, double> per_category;
  double overall = 0.0;  // unweighted mean of per_category
};

CategoryAverage aggregate_by_category(std::span<const std::pair<std::string, double>> values);

struct JndPair {
  double distance = 0.0;
  bool same = false;
};

/// Average precision of "different" pairs ranked by descending distance.
/// Equal distances form one block that is admitted together.
double jnd_map(std::span<const JndPair> pairs);

/// Metric outputs for one triplet.
struct SampleScores {
  std::string id;
  std::string category;
  double h = 0.5;
  double s1 = 0.0;  // full-size images
  double s2 = 0.0;
  double s1_crop = 0.0;  // shift-crop geometry, no shift
  double s2_crop = 0.0;
  std::map<std::size_t, std::pair<double, double>> shifted;  // k -> (s1, s2)
};

struct CategoryReport {
  std::size_t samples = 0;
  double two_afc = 0.0;
  std::map<std::size_t, double> rrf;
};

struct EvalReport {
  double two_afc = 0.0;
  std::map<std::size_t, double> rrf;  // k -> percent
  std::map<std::string, CategoryReport> per_category;
  std::optional<double> jnd_map;
};

/// Per-category means, then the unweighted mean over categories. Every sample
/// must carry the same set of shifts.
EvalReport build_report(std::span<const SampleScores> scores);

SampleScores score_sample(const BackboneConfig& cfg, const WeightStore& weights,
                          const LinearHead& head, const LabeledTriplet& item,
                          std::span<const std::size_t> shifts);

std::vector<SampleScores> score_dataset(const BackboneConfig& cfg, const WeightStore& weights,
                                        const LinearHead& head,
                                        std::span<const LabeledTriplet> data,
                                        std::span<const std::size_t> shifts, std::size_t threads);

inline const std::vector<std::string>& synth_categories() {
  static const std::vector<std::string> names{"gaussian-noise", "box-blur", "intensity-scale",
                                              "block-shuffle"};
  return names;
}

/// Multi-octave smoothed noise with amplitude growing with scale, quantized
/// to the 8-bit grid of the image codec.
Tensor smoothed_noise(Rng& rng, std::size_t channels, std::size_t size);

/// Applies a named synthetic distortion with strength in [0, 1].
Tensor distort(const Tensor& x, const std::string& category, double strength, Rng& rng);

/// Root mean squared difference.
double rmse(const Tensor& a, const Tensor& b);

/// Desk-scale triplets: category i cycles through synth_categories(); both
/// distortions of a sample share its category. The smaller-RMSE distortion
/// gets preference 1.0 when the RMSE ratio is at least 1.5, else 0.8.
std::vector<LabeledTriplet> synth_dataset(std::uint64_t seed, std::size_t n, std::size_t size);

/// Per-level |F(x) - F(x shifted by k)| on normalized embeddings, with both
/// inputs taken through the shift crop. Maps are 1 x H x W in [0, 1].
std::vector<Tensor> difference_maps(const BackboneConfig& cfg, const WeightStore& weights,
                                    const Tensor& x, std::size_t k);

/// Mean over levels of the mean difference-map value.
double mean_shift_difference(const BackboneConfig& cfg, const WeightStore& weights,
                             const Tensor& x, std::size_t k);

}  // namespace stim
