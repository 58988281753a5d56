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

#include "stim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "stim/error.hpp"
#include "stim/image.hpp"
#include "stim/ops.hpp"
#include "stim/parallel.hpp"

namespace stim {
namespace {

void check_shift(const Tensor& x, std::size_t k) {
  if (x.rank() < 2) throw InvalidArgument("shift_crop: image must have spatial axes");
  if (k > kMaxShift) throw InvalidArgument("shift_crop: k=" + std::to_string(k) + " exceeds 3");
  if (x.width() < k + kShiftCropMargin + 1)
    throw InvalidArgument("shift_crop: width " + std::to_string(x.width()) + " too small for k=" +
                          std::to_string(k));
}

Tensor crop_columns(const Tensor& x, std::size_t left) {
  return crop(x, 0, left, x.height(), x.width() - kShiftCropMargin);
}

}  // namespace

ShiftedSample shift_crop(const TripletSample& sample, std::size_t k) {
  for (const Tensor* t : {&sample.ref, &sample.p0, &sample.p1}) check_shift(*t, k);
  ShiftedSample out;
  out.k = k;
  out.original.ref = crop_columns(sample.ref, 0);
  out.original.p0 = crop_columns(sample.p0, 0);
  out.original.p1 = crop_columns(sample.p1, 0);
  out.original.h = sample.h;
  out.shifted.ref = out.original.ref;
  out.shifted.p0 = crop_columns(sample.p0, k);
  out.shifted.p1 = crop_columns(sample.p1, k);
  out.shifted.h = sample.h;
  return out;
}

bool rank_flipped(const RankScores& r) { return (r.s1 < r.s2) != (r.s1_shifted < r.s2_shifted); }

double rank_flip_rate(std::span<const RankScores> scores) {
  if (scores.empty()) throw InvalidArgument("rank_flip_rate: no samples");
  const auto flips = std::count_if(scores.begin(), scores.end(), rank_flipped);
  return 100.0 * static_cast<double>(flips) / static_cast<double>(scores.size());
}

double two_afc_credit(const AfcScore& score) {
  if (!(score.h >= 0.0 && score.h <= 1.0))
    throw InvalidArgument("two_afc: h=" + std::to_string(score.h) + " outside [0, 1]");
  if (score.s2 < score.s1) return score.h;
  if (score.s1 < score.s2) return 1.0 - score.h;
  return 0.5;
}

double two_afc(std::span<const AfcScore> scores) {
  if (scores.empty()) throw InvalidArgument("two_afc: no samples");
  double sum = 0.0;
  for (const auto& s : scores) sum += two_afc_credit(s);
  return 100.0 * sum / static_cast<double>(scores.size());
}

CategoryAverage aggregate_by_category(std::span<const std::pair<std::string, double>> values) {
  if (values.empty()) throw InvalidArgument("aggregate_by_category: no samples");
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].first.empty())
      throw InvalidArgument("aggregate_by_category: sample " + std::to_string(i) +
                            " has no category");
    auto& [sum, count] = acc[values[i].first];
    sum += values[i].second;
    ++count;
  }
  CategoryAverage out;
  double total = 0.0;
  for (const auto& [name, sc] : acc) {
    const double mean = sc.first / static_cast<double>(sc.second);
    out.per_category[name] = mean;
    total += mean;
  }
  out.overall = total / static_cast<double>(acc.size());
  return out;
}

double jnd_map(std::span<const JndPair> pairs) {
  const auto positives = static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const JndPair& p) { return !p.same; }));
  if (positives == 0 || positives == pairs.size())
    throw InvalidArgument("jnd_map: need both same and different pairs");
  std::vector<JndPair> sorted(pairs.begin(), pairs.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const JndPair& a, const JndPair& b) { return a.distance > b.distance; });
  // Tied distances are indistinguishable to the metric, so a block of equal
  // distances is scored at the precision reached after the whole block.
  double ap = 0.0;
  std::size_t seen = 0, hits = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i, block_hits = 0;
    while (j < sorted.size() && sorted[j].distance == sorted[i].distance) {
      if (!sorted[j].same) ++block_hits;
      ++j;
    }
    seen += j - i;
    hits += block_hits;
    ap += static_cast<double>(block_hits) * static_cast<double>(hits) / static_cast<double>(seen);
    i = j;
  }
  return ap / static_cast<double>(positives);
}

EvalReport build_report(std::span<const SampleScores> scores) {
  if (scores.empty()) throw InvalidArgument("build_report: no samples");
  std::set<std::size_t> shifts;
  for (const auto& [k, v] : scores.front().shifted) shifts.insert(k);
  std::vector<std::pair<std::string, double>> credit;
  std::map<std::size_t, std::vector<std::pair<std::string, double>>> flips;
  for (const auto& s : scores) {
    std::set<std::size_t> ks;
    for (const auto& [k, v] : s.shifted) ks.insert(k);
    if (ks != shifts) throw InvalidArgument("build_report: sample " + s.id + " has different shifts");
    credit.emplace_back(s.category, 100.0 * two_afc_credit({s.s1, s.s2, s.h}));
    for (const auto& [k, v] : s.shifted) {
      const bool f = rank_flipped({s.s1_crop, s.s2_crop, v.first, v.second});
      flips[k].emplace_back(s.category, f ? 100.0 : 0.0);
    }
  }
  EvalReport report;
  const CategoryAverage afc = aggregate_by_category(credit);
  report.two_afc = afc.overall;
  for (const auto& [name, value] : afc.per_category) report.per_category[name].two_afc = value;
  for (const auto& s : scores) ++report.per_category[s.category].samples;
  for (const auto& [k, list] : flips) {
    const CategoryAverage rrf = aggregate_by_category(list);
    report.rrf[k] = rrf.overall;
    for (const auto& [name, value] : rrf.per_category) report.per_category[name].rrf[k] = value;
  }
  return report;
}

SampleScores score_sample(const BackboneConfig& cfg, const WeightStore& weights,
                          const LinearHead& head, const LabeledTriplet& item,
                          std::span<const std::size_t> shifts) {
  const TripletSample& t = item.sample;
  SampleScores out;
  out.id = item.id;
  out.category = item.category;
  out.h = t.h;
  const FeatureStack ref = forward(cfg, weights, t.ref);
  out.s1 = distance(head, ref, forward(cfg, weights, t.p0));
  out.s2 = distance(head, ref, forward(cfg, weights, t.p1));
  if (shifts.empty()) return out;

  const ShiftedSample base = shift_crop(t, 0);
  const FeatureStack ref_c = forward(cfg, weights, base.original.ref);
  out.s1_crop = distance(head, ref_c, forward(cfg, weights, base.original.p0));
  out.s2_crop = distance(head, ref_c, forward(cfg, weights, base.original.p1));
  for (const std::size_t k : shifts) {
    if (k == 0) {
      out.shifted[k] = {out.s1_crop, out.s2_crop};
      continue;
    }
    const ShiftedSample sh = shift_crop(t, k);
    out.shifted[k] = {distance(head, ref_c, forward(cfg, weights, sh.shifted.p0)),
                      distance(head, ref_c, forward(cfg, weights, sh.shifted.p1))};
  }
  return out;
}

std::vector<SampleScores> score_dataset(const BackboneConfig& cfg, const WeightStore& weights,
                                        const LinearHead& head,
                                        std::span<const LabeledTriplet> data,
                                        std::span<const std::size_t> shifts, std::size_t threads) {
  std::vector<SampleScores> out(data.size());
  parallel_for(data.size(), threads,
               [&](std::size_t i) { out[i] = score_sample(cfg, weights, head, data[i], shifts); });
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic triplets

namespace {

// Separable Gaussian blur with circular boundary, in place on one plane.
void gaussian_blur_circular(std::vector<double>& plane, std::size_t n, double sigma) {
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double norm = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    norm += taps[i + radius];
  }
  for (auto& t : taps) t /= norm;
  const auto sn = static_cast<long>(n);
  auto wrap = [sn](long i) { return static_cast<std::size_t>(((i % sn) + sn) % sn); };
  std::vector<double> tmp(plane.size());
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      double acc = 0.0;
      for (long i = -radius; i <= radius; ++i)
        acc += taps[i + radius] * plane[y * n + wrap(static_cast<long>(x) + i)];
      tmp[y * n + x] = acc;
    }
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      double acc = 0.0;
      for (long i = -radius; i <= radius; ++i)
        acc += taps[i + radius] * tmp[wrap(static_cast<long>(y) + i) * n + x];
      plane[y * n + x] = acc;
    }
}

std::vector<double> octave_noise(Rng& rng, std::size_t n) {
  std::vector<double> sum(n * n, 0.0);
  for (const double sigma : {1.0, 2.0, 4.0, 8.0}) {
    std::vector<double> layer(n * n);
    for (auto& v : layer) v = rng.normal();
    gaussian_blur_circular(layer, n, sigma);
    // Blurring white noise shrinks its deviation by ~1/(2 sigma sqrt(pi));
    // scaling by sigma^2 leaves coarse octaves dominant.
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += sigma * sigma * layer[i];
  }
  return sum;
}

Tensor clamp_unit(Tensor x) {
  for (auto& v : x.data()) v = std::clamp(v, -1.0f, 1.0f);
  return x;
}

Tensor box_blur(const Tensor& x, std::size_t radius) {
  const std::size_t h = x.height(), w = x.width();
  Tensor out(x.dims());
  const auto r = static_cast<long>(radius);
  for (std::size_t p = 0; p < x.planes(); ++p) {
    const auto in = x.plane(p);
    auto dst = out.plane(p);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t xx = 0; xx < w; ++xx) {
        double acc = 0.0;
        for (long dy = -r; dy <= r; ++dy)
          for (long dx = -r; dx <= r; ++dx) {
            const long yy = std::clamp<long>(static_cast<long>(y) + dy, 0, static_cast<long>(h) - 1);
            const long xc = std::clamp<long>(static_cast<long>(xx) + dx, 0, static_cast<long>(w) - 1);
            acc += in[static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xc)];
          }
        dst[y * w + xx] = static_cast<float>(acc / static_cast<double>((2 * r + 1) * (2 * r + 1)));
      }
  }
  return out;
}

}  // namespace

Tensor smoothed_noise(Rng& rng, std::size_t channels, std::size_t size) {
  if (channels == 0 || size == 0) throw InvalidArgument("smoothed_noise: empty image");
  // A shared luminance field plus weaker per-channel color variation.
  const std::vector<double> lum = octave_noise(rng, size);
  std::vector<double> field(channels * size * size);
  for (std::size_t c = 0; c < channels; ++c) {
    const std::vector<double> chroma = octave_noise(rng, size);
    for (std::size_t i = 0; i < size * size; ++i) field[c * size * size + i] = lum[i] + 0.35 * chroma[i];
  }
  const double mean = std::accumulate(field.begin(), field.end(), 0.0) / static_cast<double>(field.size());
  double var = 0.0;
  for (const double v : field) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(field.size())) + 1e-12;
  Tensor out({channels, size, size});
  for (std::size_t i = 0; i < field.size(); ++i)
    out[i] = static_cast<float>(std::clamp(0.4 * (field[i] - mean) / sd, -1.0, 1.0));
  return quantize(out);
}

Tensor distort(const Tensor& x, const std::string& category, double strength, Rng& rng) {
  const double t = std::clamp(strength, 0.0, 1.0);
  if (category == "gaussian-noise") {
    const double sigma = 0.03 + 0.3 * t;
    Tensor out = x;
    for (auto& v : out.data()) v = static_cast<float>(v + sigma * rng.normal());
    return quantize(clamp_unit(std::move(out)));
  }
  if (category == "box-blur") {
    const double alpha = 0.2 + 0.8 * t;
    const Tensor blurred = box_blur(x, 2);
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<float>((1.0 - alpha) * x[i] + alpha * blurred[i]);
    return quantize(out);
  }
  if (category == "intensity-scale") {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double gain = 1.0 + sign * (0.05 + 0.45 * t);
    const double offset = 0.1 * t * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    Tensor out = x;
    for (auto& v : out.data()) v = static_cast<float>(v * gain + offset);
    return quantize(clamp_unit(std::move(out)));
  }
  if (category == "block-shuffle") {
    const std::size_t h = x.height(), w = x.width();
    const std::size_t block = std::max<std::size_t>(2, std::min(h, w) / 8);
    const std::size_t by = h / block, bx = w / block, blocks = by * bx;
    if (blocks < 2) throw InvalidArgument("distort: image too small for block-shuffle");
    const std::size_t swaps = 1 + static_cast<std::size_t>(t * static_cast<double>(blocks) / 4.0);
    Tensor out = x;
    for (std::size_t s = 0; s < swaps; ++s) {
      const std::size_t a = rng.below(blocks);
      std::size_t b = rng.below(blocks - 1);
      if (b >= a) ++b;
      const std::size_t ay = (a / bx) * block, ax = (a % bx) * block;
      const std::size_t byy = (b / bx) * block, bxx = (b % bx) * block;
      for (std::size_t p = 0; p < out.planes(); ++p) {
        auto pl = out.plane(p);
        for (std::size_t y = 0; y < block; ++y)
          for (std::size_t xx = 0; xx < block; ++xx)
            std::swap(pl[(ay + y) * w + ax + xx], pl[(byy + y) * w + bxx + xx]);
      }
    }
    return out;
  }
  throw InvalidArgument("unknown distortion category '" + category + "'");
}

double rmse(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims())
    throw InvalidArgument("rmse: shape mismatch " + to_string(a.dims()) + " vs " + to_string(b.dims()));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

std::vector<LabeledTriplet> synth_dataset(std::uint64_t seed, std::size_t n, std::size_t size) {
  if (n == 0) throw InvalidArgument("synth_dataset: n must be positive");
  if (size < 16) throw InvalidArgument("synth_dataset: size must be at least 16");
  const auto& categories = synth_categories();
  std::vector<LabeledTriplet> out;
  out.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledTriplet item;
    char id[32];
    std::snprintf(id, sizeof id, "s%04zu", i);
    item.id = id;
    item.category = categories[i % categories.size()];
    item.sample.ref = smoothed_noise(rng, 3, size);
    double r0 = 0.0, r1 = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw std::logic_error("synth_dataset: could not draw untied distortions");
      item.sample.p0 = distort(item.sample.ref, item.category, rng.uniform(), rng);
      item.sample.p1 = distort(item.sample.ref, item.category, rng.uniform(), rng);
      r0 = rmse(item.sample.ref, item.sample.p0);
      r1 = rmse(item.sample.ref, item.sample.p1);
      if (r0 != r1) break;
    }
    const double ratio = std::max(r0, r1) / std::max(std::min(r0, r1), 1e-12);
    const double pref = ratio >= 1.5 ? 1.0 : 0.8;
    item.sample.h = r1 < r0 ? pref : 1.0 - pref;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<Tensor> difference_maps(const BackboneConfig& cfg, const WeightStore& weights,
                                    const Tensor& x, std::size_t k) {
  check_shift(x, k);
  const FeatureStack a = forward(cfg, weights, crop_columns(x, 0));
  const FeatureStack b = forward(cfg, weights, crop_columns(x, k));
  std::vector<Tensor> maps;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    const Tensor na = normalize_channels(a.levels[l]);
    const Tensor nb = normalize_channels(b.levels[l]);
    const std::size_t c_n = na.channels(), h = na.height(), w = na.width(), n = h * w;
    Tensor map({1, h, w});
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t c = 0; c < c_n; ++c) {
        const double d = static_cast<double>(na[c * n + i]) - static_cast<double>(nb[c * n + i]);
        sq += d * d;
      }
      // Unit vectors are at most 2 apart.
      map[i] = static_cast<float>(std::min(1.0, std::sqrt(sq) / 2.0));
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

double mean_shift_difference(const BackboneConfig& cfg, const WeightStore& weights,
                             const Tensor& x, std::size_t k) {
  const std::vector<Tensor> maps = difference_maps(cfg, weights, x, k);
  double total = 0.0;
  for (const Tensor& m : maps) {
    double sum = 0.0;
    for (const float v : m.data()) sum += v;
    total += sum / static_cast<double>(m.size());
  }
  return total / static_cast<double>(maps.size());
}

}  // namespace stim
