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

#include "stim/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stim/error.hpp"
#include "stim/parallel.hpp"
#include "stim/random.hpp"

namespace stim {

LinearHead LinearHead::constant(const std::vector<std::size_t>& channels, float value) {
  LinearHead head;
  for (auto c : channels) head.weights.emplace_back(c, value);
  return head;
}

void LinearHead::store_into(WeightStore& store) const {
  for (std::size_t l = 0; l < weights.size(); ++l)
    store.set("head.level" + std::to_string(l), Tensor({weights[l].size()}, weights[l]));
}

bool LinearHead::present_in(const WeightStore& store) { return store.contains("head.level0"); }

LinearHead LinearHead::from_store(const WeightStore& store) {
  LinearHead head;
  for (std::size_t l = 0;; ++l) {
    const std::string name = "head.level" + std::to_string(l);
    if (!store.contains(name)) break;
    const Tensor& t = store.get(name);
    for (float v : t.data())
      if (!(v >= 0.0f)) throw InvalidArgument(name + " holds a negative or non-finite weight");
    head.weights.emplace_back(t.data().begin(), t.data().end());
  }
  if (head.weights.empty()) throw WeightNotFound("head.level0");
  return head;
}

Tensor normalize_channels(const Tensor& f) {
  if (f.rank() != 3) throw InvalidArgument("normalize_channels: expects C x H x W");
  const std::size_t c_n = f.channels(), n = f.height() * f.width();
  Tensor out(f.dims());
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < c_n; ++c) {
      const double v = f[c * n + i];
      sq += v * v;
    }
    const double denom = std::sqrt(sq) + kNormEpsilon;
    for (std::size_t c = 0; c < c_n; ++c) out[c * n + i] = static_cast<float>(f[c * n + i] / denom);
  }
  return out;
}

PairDiff pair_diff(const FeatureStack& a, const FeatureStack& b) {
  if (a.levels.size() != b.levels.size())
    throw InvalidArgument("feature stacks have " + std::to_string(a.levels.size()) + " and " +
                          std::to_string(b.levels.size()) + " levels");
  PairDiff out;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    if (a.levels[l].dims() != b.levels[l].dims())
      throw InvalidArgument("level " + std::to_string(l) + " shape mismatch " +
                            to_string(a.levels[l].dims()) + " vs " + to_string(b.levels[l].dims()));
    const Tensor na = normalize_channels(a.levels[l]);
    const Tensor nb = normalize_channels(b.levels[l]);
    LevelDiff d;
    d.channels = na.channels();
    d.spatial = na.height() * na.width();
    d.values.resize(na.size());
    d.channel_means.assign(d.channels, 0.0);
    for (std::size_t c = 0; c < d.channels; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < d.spatial; ++i) {
        const std::size_t idx = c * d.spatial + i;
        const double diff = static_cast<double>(na[idx]) - static_cast<double>(nb[idx]);
        d.values[idx] = static_cast<float>(diff * diff);
        sum += diff * diff;
      }
      d.channel_means[c] = sum / static_cast<double>(d.spatial);
    }
    out.levels.push_back(std::move(d));
  }
  return out;
}

namespace {

void check_compatible(const LinearHead& head, const PairDiff& diff) {
  if (head.levels() != diff.levels.size())
    throw InvalidArgument("head has " + std::to_string(head.levels()) + " levels, features have " +
                          std::to_string(diff.levels.size()));
  for (std::size_t l = 0; l < head.levels(); ++l)
    if (head.weights[l].size() != diff.levels[l].channels)
      throw InvalidArgument("head level " + std::to_string(l) + " has " +
                            std::to_string(head.weights[l].size()) + " weights for " +
                            std::to_string(diff.levels[l].channels) + " channels");
}

using ChannelFeatures = std::vector<std::vector<double>>;

double weighted_sum(const LinearHead& head, const ChannelFeatures& f) {
  double d = 0.0;
  for (std::size_t l = 0; l < f.size(); ++l)
    for (std::size_t c = 0; c < f[l].size(); ++c) d += static_cast<double>(head.weights[l][c]) * f[l][c];
  return d;
}

ChannelFeatures means_of(const PairDiff& diff) {
  ChannelFeatures f;
  for (const auto& lv : diff.levels) f.push_back(lv.channel_means);
  return f;
}

// Channel means after inverted dropout of individual difference-map entries.
// Dropped positions are visited by geometric skips, so the cost scales with
// the drop rate rather than the map size.
ChannelFeatures dropped_means(const PairDiff& diff, double rate, Rng& rng) {
  ChannelFeatures f;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (const auto& lv : diff.levels) {
    std::vector<double> sums(lv.channels);
    for (std::size_t c = 0; c < lv.channels; ++c)
      sums[c] = lv.channel_means[c] * static_cast<double>(lv.spatial);
    const std::size_t n = lv.values.size();
    for (std::size_t idx = rng.geometric(rate); idx < n; idx += 1 + rng.geometric(rate))
      sums[idx / lv.spatial] -= lv.values[idx];
    for (auto& s : sums) s = std::max(0.0, s) * keep_scale / static_cast<double>(lv.spatial);
    f.push_back(std::move(sums));
  }
  return f;
}

// Accumulates scale * d(s - h)^2 / dw into grad; returns (s - h)^2.
double accumulate_gradient(const LinearHead& head, const ChannelFeatures& f0,
                           const ChannelFeatures& f1, double h, double scale,
                           std::vector<std::vector<double>>& grad) {
  const double s1 = weighted_sum(head, f0);
  const double s2 = weighted_sum(head, f1);
  const double total = s1 + s2 + kRatioEpsilon;
  const double s = s1 / total;
  const double outer = scale * 2.0 * (s - h) / (total * total);
  for (std::size_t l = 0; l < grad.size(); ++l)
    for (std::size_t c = 0; c < grad[l].size(); ++c)
      grad[l][c] += outer * (f0[l][c] * (s2 + kRatioEpsilon) - s1 * f1[l][c]);
  return (s - h) * (s - h);
}

std::vector<std::vector<double>> zeros_like(const LinearHead& head) {
  std::vector<std::vector<double>> g;
  for (const auto& lv : head.weights) g.emplace_back(lv.size(), 0.0);
  return g;
}

double single_loss(const LinearHead& head, const TripletDiffs& t) {
  const Preference p = preference_from(distance(head, t.d0), distance(head, t.d1));
  return (p.s - t.h) * (p.s - t.h);
}

}  // namespace

double distance(const LinearHead& head, const PairDiff& diff) {
  check_compatible(head, diff);
  return weighted_sum(head, means_of(diff));
}

double distance(const LinearHead& head, const FeatureStack& a, const FeatureStack& b) {
  return distance(head, pair_diff(a, b));
}

Preference preference_from(double s1, double s2) {
  return {s1, s2, s1 / (s1 + s2 + kRatioEpsilon)};
}

Preference preference(const LinearHead& head, const BackboneConfig& cfg, const WeightStore& weights,
                      const TripletSample& sample) {
  const FeatureStack fr = forward(cfg, weights, sample.ref);
  return preference_from(distance(head, fr, forward(cfg, weights, sample.p0)),
                         distance(head, fr, forward(cfg, weights, sample.p1)));
}

TripletDiffs triplet_diffs(const BackboneConfig& cfg, const WeightStore& weights,
                           const TripletSample& sample) {
  if (sample.ref.dims() != sample.p0.dims() || sample.ref.dims() != sample.p1.dims())
    throw InvalidArgument("triplet images must share dims");
  if (!(sample.h >= 0.0 && sample.h <= 1.0)) throw InvalidArgument("triplet h outside [0, 1]");
  const FeatureStack fr = forward(cfg, weights, sample.ref);
  return {pair_diff(fr, forward(cfg, weights, sample.p0)),
          pair_diff(fr, forward(cfg, weights, sample.p1)), sample.h};
}

double preference_loss(const LinearHead& head, std::span<const TripletDiffs> data) {
  if (data.empty()) throw InvalidArgument("preference_loss: empty data");
  double sum = 0.0;
  for (const auto& t : data) sum += single_loss(head, t);
  return sum / static_cast<double>(data.size());
}

std::vector<std::vector<double>> loss_gradient(const LinearHead& head, const TripletDiffs& sample) {
  check_compatible(head, sample.d0);
  check_compatible(head, sample.d1);
  auto grad = zeros_like(head);
  accumulate_gradient(head, means_of(sample.d0), means_of(sample.d1), sample.h, 1.0, grad);
  return grad;
}

LinearHead train_head(std::span<const TripletDiffs> data, const TrainOpts& opts,
                      const LinearHead& init) {
  if (data.empty()) throw InvalidArgument("train_head: empty training data");
  if (opts.steps < 0 || opts.learning_rate < 0.0 || opts.dropout < 0.0 || opts.dropout >= 1.0)
    throw InvalidArgument("train_head: invalid options");
  for (const auto& t : data) {
    check_compatible(init, t.d0);
    check_compatible(init, t.d1);
  }

  Rng rng(opts.seed);
  LinearHead head = init;
  LinearHead best = init;
  double best_loss = preference_loss(init, data);
  if (!std::isfinite(best_loss)) throw DivergenceError(0);

  auto m = zeros_like(head);
  auto v = zeros_like(head);
  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch =
      opts.batch_size == 0 ? data.size() : std::min(opts.batch_size, data.size());
  std::size_t cursor = data.size();

  for (int step = 1; step <= opts.steps; ++step) {
    if (batch < data.size() && cursor + batch > data.size()) {
      // Fisher-Yates with the portable generator.
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      cursor = 0;
    }
    const std::size_t begin = batch < data.size() ? cursor : 0;
    cursor += batch;

    auto grad = zeros_like(head);
    double loss = 0.0;
    const double scale = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const TripletDiffs& t = data[order[begin + b]];
      if (opts.dropout > 0.0) {
        loss += accumulate_gradient(head, dropped_means(t.d0, opts.dropout, rng),
                                    dropped_means(t.d1, opts.dropout, rng), t.h, scale, grad);
      } else {
        loss += accumulate_gradient(head, means_of(t.d0), means_of(t.d1), t.h, scale, grad);
      }
    }
    if (!std::isfinite(loss)) throw DivergenceError(step);

    for (std::size_t l = 0; l < head.levels(); ++l) {
      for (std::size_t c = 0; c < head.weights[l].size(); ++c) {
        double update = grad[l][c];
        if (opts.optimizer == Optimizer::adam) {
          m[l][c] = beta1 * m[l][c] + (1.0 - beta1) * grad[l][c];
          v[l][c] = beta2 * v[l][c] + (1.0 - beta2) * grad[l][c] * grad[l][c];
          const double mh = m[l][c] / (1.0 - std::pow(beta1, step));
          const double vh = v[l][c] / (1.0 - std::pow(beta2, step));
          update = mh / (std::sqrt(vh) + adam_eps);
        }
        const double w = static_cast<double>(head.weights[l][c]) - opts.learning_rate * update;
        head.weights[l][c] = static_cast<float>(std::max(0.0, w));
      }
    }

    if (step % std::max(1, opts.eval_every) == 0 || step == opts.steps) {
      const double full = preference_loss(head, data);
      if (!std::isfinite(full)) throw DivergenceError(step);
      if (full < best_loss) {
        best_loss = full;
        best = head;
      }
    }
  }
  return best;
}

LinearHead train_head(std::span<const TripletDiffs> data, const TrainOpts& opts) {
  if (data.empty()) throw InvalidArgument("train_head: empty training data");
  std::vector<std::size_t> channels;
  for (const auto& lv : data.front().d0.levels) channels.push_back(lv.channels);
  return train_head(data, opts, LinearHead::constant(channels, opts.initial_weight));
}

LinearHead train_head(const BackboneConfig& cfg, const WeightStore& weights,
                      std::span<const TripletSample> data, const TrainOpts& opts) {
  if (data.empty()) throw InvalidArgument("train_head: empty training data");
  std::vector<TripletDiffs> diffs(data.size());
  parallel_for(data.size(), eval_threads(),
               [&](std::size_t i) { diffs[i] = triplet_diffs(cfg, weights, data[i]); });
  return train_head(diffs, opts);
}

double grad_check(const LinearHead& head, const TripletDiffs& sample) {
  constexpr double step = 1e-3;
  const auto analytic = loss_gradient(head, sample);
  double worst = 0.0;
  for (std::size_t l = 0; l < head.levels(); ++l) {
    for (std::size_t c = 0; c < head.weights[l].size(); ++c) {
      // Perturb in double; a float head would round the step.
      const double w = head.weights[l][c];
      auto loss_at = [&](double wv) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t ll = 0; ll < head.levels(); ++ll)
          for (std::size_t cc = 0; cc < head.weights[ll].size(); ++cc) {
            const double wi = (ll == l && cc == c) ? wv : static_cast<double>(head.weights[ll][cc]);
            s1 += wi * sample.d0.levels[ll].channel_means[cc];
            s2 += wi * sample.d1.levels[ll].channel_means[cc];
          }
        const double s = s1 / (s1 + s2 + kRatioEpsilon);
        return (s - sample.h) * (s - sample.h);
      };
      const double numeric = (loss_at(w + step) - loss_at(w - step)) / (2.0 * step);
      const double a = analytic[l][c];
      worst = std::max(worst, std::abs(a - numeric) / (std::abs(a) + std::abs(numeric) + 1e-8));
    }
  }
  return worst;
}

double grad_check(const BackboneConfig& cfg, const WeightStore& weights, const LinearHead& head,
                  const TripletSample& sample) {
  return grad_check(head, triplet_diffs(cfg, weights, sample));
}

}  // namespace stim
