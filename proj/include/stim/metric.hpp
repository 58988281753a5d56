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
#include <span>
#include <vector>

#include "stim/backbone.hpp"
#include "stim/tensor.hpp"
#include "stim/weights.hpp"

namespace stim {

inline constexpr double kNormEpsilon = 1e-10;
inline constexpr double kRatioEpsilon = 1e-10;

/// Per-level, per-channel nonnegative weights.
struct LinearHead {
  std::vector<std::vector<float>> weights;

  std::size_t levels() const noexcept { return weights.size(); }

  static LinearHead constant(const std::vector<std::size_t>& channels, float value);

  /// Stores level i under "head.level{i}".
  void store_into(WeightStore& store) const;
  static LinearHead from_store(const WeightStore& store);
  static bool present_in(const WeightStore& store);
};

/// A reference, two distortions, and the fraction h of observers who judged
/// p1 closer to the reference.
struct TripletSample {
  Tensor ref;
  Tensor p0;
  Tensor p1;
  double h = 0.5;
};

/// Divides each spatial location's channel vector by (its L2 norm + 1e-10).
Tensor normalize_channels(const Tensor& f);

/// Squared differences of channel-normalized embeddings, kept per level as
/// channel-major C x (H*W) maps together with their per-channel spatial means.
struct LevelDiff {
  std::size_t channels = 0;
  std::size_t spatial = 0;
  std::vector<float> values;
  std::vector<double> channel_means;
};

struct PairDiff {
  std::vector<LevelDiff> levels;
};

PairDiff pair_diff(const FeatureStack& a, const FeatureStack& b);

/// sum over levels of mean over locations of sum_c w_c (a_c - b_c)^2 on
/// normalized embeddings.
double distance(const LinearHead& head, const FeatureStack& a, const FeatureStack& b);
double distance(const LinearHead& head, const PairDiff& diff);

struct Preference {
  double s1 = 0.0;  // distance(ref, p0)
  double s2 = 0.0;  // distance(ref, p1)
  double s = 0.0;   // s1 / (s1 + s2 + 1e-10)
};

Preference preference_from(double s1, double s2);
Preference preference(const LinearHead& head, const BackboneConfig& cfg, const WeightStore& weights,
                      const TripletSample& sample);

/// A triplet reduced to the quantities the head depends on.
struct TripletDiffs {
  PairDiff d0;  // ref vs p0
  PairDiff d1;  // ref vs p1
  double h = 0.5;
};

TripletDiffs triplet_diffs(const BackboneConfig& cfg, const WeightStore& weights,
                           const TripletSample& sample);

enum class Optimizer { gradient_descent, adam };

struct TrainOpts {
  int steps = 1000;
  double learning_rate = 1e-2;
  double dropout = 0.01;    // on difference maps, training only
  std::size_t batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::adam;
  float initial_weight = 1.0f;
  int eval_every = 25;  // full-data loss checkpoints for the returned head
};

/// Mean (s - h)^2 over the data with dropout off.
double preference_loss(const LinearHead& head, std::span<const TripletDiffs> data);

/// Analytic gradient of the single-sample loss (s - h)^2 w.r.t. every head weight.
std::vector<std::vector<double>> loss_gradient(const LinearHead& head, const TripletDiffs& sample);

/// Trains head weights only, projecting onto w >= 0 after each step. The
/// returned head is the best full-data checkpoint, so its loss never exceeds
/// the initial loss.
LinearHead train_head(std::span<const TripletDiffs> data, const TrainOpts& opts,
                      const LinearHead& init);
LinearHead train_head(std::span<const TripletDiffs> data, const TrainOpts& opts);
LinearHead train_head(const BackboneConfig& cfg, const WeightStore& weights,
                      std::span<const TripletSample> data, const TrainOpts& opts);

/// max over weights of |analytic - numeric| / (|analytic| + |numeric| + 1e-8),
/// numeric by central differences with step 1e-3.
double grad_check(const LinearHead& head, const TripletDiffs& sample);
double grad_check(const BackboneConfig& cfg, const WeightStore& weights, const LinearHead& head,
                  const TripletSample& sample);

}  // namespace stim
