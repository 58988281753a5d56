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

// Release gate: prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stim/aa_layers.hpp"
#include "stim/backbone.hpp"
#include "stim/error.hpp"
#include "stim/eval.hpp"
#include "stim/metric.hpp"
#include "stim/ops.hpp"
#include "stim/parallel.hpp"
#include "stim/weights.hpp"

namespace {

using namespace stim;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ConvSpec random_conv(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t k, std::size_t stride,
                     PaddingSpec pad) {
  ConvSpec spec;
  const double bound = 1.0 / std::sqrt(static_cast<double>(c_in * k * k));
  spec.kernel = oracle::random_tensor(rng, {c_out, c_in, k, k}, -bound, bound);
  for (std::size_t o = 0; o < c_out; ++o) spec.bias.push_back(static_cast<float>(rng.uniform(-0.5, 0.5)));
  spec.stride = stride;
  spec.padding = pad;
  return spec;
}

// ---------------------------------------------------------------------------

Outcome operator_oracles() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c_in = oracle::random_between(rng, 1, 8), c_out = oracle::random_between(rng, 1, 8);
    const std::size_t h = oracle::random_between(rng, 1, 8), w = oracle::random_between(rng, 1, 8);
    const std::size_t kmax = std::min<std::size_t>(8, std::min(h, w) + 2);
    const std::size_t k = oracle::random_between(rng, 1, kmax);
    const PadMode mode = static_cast<PadMode>(rng.below(3));
    const std::size_t pmax = mode == PadMode::reflection ? std::min(h, w) - 1 : 2;
    std::size_t p = rng.below(pmax + 1);
    while (h + 2 * p < k || w + 2 * p < k) ++p;
    if (mode == PadMode::reflection && (p >= h || p >= w)) {
      --trial;
      continue;
    }
    const ConvSpec spec = random_conv(rng, c_in, c_out, k, oracle::random_between(rng, 1, 3),
                                      PaddingSpec::uniform(mode, p));
    const Tensor x = oracle::random_tensor(rng, {c_in, h, w});
    worst[0] = std::max(worst[0], oracle::max_abs_diff(conv2d(x, spec),
                                                       oracle::conv2d(x, spec.kernel, spec.bias, spec.stride, spec.padding)));

    const std::size_t win = oracle::random_between(rng, 1, std::min(h, w)), s = oracle::random_between(rng, 1, 3);
    worst[1] = std::max(worst[1], oracle::max_abs_diff(maxpool(x, win, s), oracle::maxpool(x, win, s)));
    worst[2] = std::max(worst[2], oracle::max_abs_diff(avgpool(x, win, s), oracle::avgpool(x, win, s)));

    const std::size_t size = oracle::random_between(rng, 1, 7);
    const PadMode border = static_cast<PadMode>(rng.below(3));
    // Reflection needs the blur padding to stay inside the image.
    if (border == PadMode::reflection && BlurKernel::binomial(size).pad_after() >= std::min(h, w)) continue;
    worst[3] = std::max(worst[3], oracle::max_abs_diff(blurpool(x, BlurKernel::binomial(size), s, border),
                                                       oracle::blurpool(x, size, s, border)));
  }
  const double secs = seconds_since(t0);
  const double all = std::max({worst[0], worst[1], worst[2], worst[3]});
  return {all <= 1e-6 && secs < 10.0,
          "max |d| conv " + fmt("%.2e", worst[0]) + " maxpool " + fmt("%.2e", worst[1]) + " avgpool " +
              fmt("%.2e", worst[2]) + " blurpool " + fmt("%.2e", worst[3]) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome decomposition_identity() {
  Rng rng(202);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = oracle::random_between(rng, 1, 12), w = oracle::random_between(rng, 1, 12);
    const std::size_t win = oracle::random_between(rng, 1, std::min(h, w)), s = oracle::random_between(rng, 1, 4);
    const Tensor x = oracle::random_tensor(rng, {oracle::random_between(rng, 1, 4), h, w});
    const Tensor strided = maxpool(x, win, s);
    const Tensor dense = downsample(maxpool(x, win, 1), s);
    // Downsampling keeps ceil((H - win + 1) / s) samples, the same as floor((H - win) / s) + 1.
    if (strided == dense) ++exact;
  }
  return {exact == 100, std::to_string(exact) + "/100 bitwise equal"};
}

Outcome equivariance() {
  Rng rng(303);
  double conv_worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 * oracle::random_between(rng, 0, 2) + 1;
    const std::size_t h = oracle::random_between(rng, k, 10), w = oracle::random_between(rng, k, 10);
    const std::size_t c_in = oracle::random_between(rng, 1, 4), c_out = oracle::random_between(rng, 1, 4);
    const ConvSpec spec = random_conv(rng, c_in, c_out, k, 1, PaddingSpec::uniform(PadMode::circular, k / 2));
    const Tensor x = oracle::random_tensor(rng, {c_in, h, w});
    const long dy = static_cast<long>(rng.below(h)), dx = static_cast<long>(rng.below(w));
    conv_worst = std::max(conv_worst, max_abs_diff(conv2d(shift_circular(x, dy, dx), spec),
                                                   shift_circular(conv2d(x, spec), dy, dx)));
  }

  double aa_worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = oracle::random_between(rng, 2, 4);
    const std::size_t h = n * oracle::random_between(rng, 2, 4), w = n * oracle::random_between(rng, 2, 4);
    const std::size_t c = oracle::random_between(rng, 1, 3);
    const Tensor x = oracle::random_tensor(rng, {c, h, w});
    const long a = static_cast<long>(rng.below(3)), b = static_cast<long>(rng.below(3));
    const Tensor xs = shift_circular(x, a * static_cast<long>(n), b * static_cast<long>(n));
    const BlurKernel k = BlurKernel::binomial(oracle::random_between(rng, 1, 7));
    auto check = [&](const Tensor& shifted_out, const Tensor& out) {
      aa_worst = std::max(aa_worst, max_abs_diff(shifted_out, shift_circular(out, a, b)));
    };
    check(blurpool(xs, k, n, PadMode::circular), blurpool(x, k, n, PadMode::circular));
    check(avg_blurpool(xs, k, n, PadMode::circular), avg_blurpool(x, k, n, PadMode::circular));
    const std::size_t win = oracle::random_between(rng, 2, 3);
    check(max_blurpool(xs, win, k, n, PadMode::circular), max_blurpool(x, win, k, n, PadMode::circular));
    const ConvSpec conv = random_conv(rng, c, 3, 3, 1, PaddingSpec::uniform(PadMode::circular, 1));
    for (BlurPlacement p : {BlurPlacement::original, BlurPlacement::feat_after_blur, BlurPlacement::blur_before_act}) {
      const AAConvVariant v = AAConvVariant::replacing(n, 1, p);
      check(aa_strided_conv(xs, conv, v, k, PadMode::circular).output,
            aa_strided_conv(x, conv, v, k, PadMode::circular).output);
    }
    SkipBlockSpec block;
    block.main = {random_conv(rng, c, 3, 3, n, PaddingSpec::uniform(PadMode::circular, 1)),
                  random_conv(rng, 3, 3, 3, 1, PaddingSpec::uniform(PadMode::circular, 1))};
    block.skip = SkipKind::aa_strided;
    block.projection = random_conv(rng, c, 3, 1, 1, {});
    check(aa_skip_block(xs, block, k, PadMode::circular), aa_skip_block(x, block, k, PadMode::circular));
  }
  return {conv_worst <= 1e-6 && aa_worst <= 1e-5,
          "conv/shift commute max |d| " + fmt("%.2e", conv_worst) + " (50 trials), stride-n AA shift-by-n max |d| " +
              fmt("%.2e", aa_worst) + " (50 trials)"};
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  const BackboneConfig cfg = preset("tiny");
  const WeightStore weights = random_weights(cfg, 404);
  Rng rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t size = oracle::random_between(rng, cfg.min_input, 16);
    TripletSample t{oracle::random_tensor(rng, {3, size, size}), oracle::random_tensor(rng, {3, size, size}),
                    oracle::random_tensor(rng, {3, size, size}), rng.uniform()};
    LinearHead head;
    for (std::size_t c : level_channels(cfg)) {
      std::vector<float> w(c);
      for (auto& v : w) v = static_cast<float>(rng.uniform(0.05, 2.0));
      head.weights.push_back(std::move(w));
    }
    worst = std::max(worst, grad_check(cfg, weights, head, t));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs < 30.0,
          "max relative error " + fmt("%.2e", worst) + " over 20 triplets, " + fmt("%.2f", secs) + " s"};
}

Outcome metric_axioms() {
  const BackboneConfig cfg = preset("tiny");
  const WeightStore weights = random_weights(cfg, 505);
  Rng rng(505);
  int identity = 0, nonneg = 0, symmetric = 0, scale = 0;
  for (int trial = 0; trial < 100; ++trial) {
    LinearHead head;
    for (std::size_t c : level_channels(cfg)) {
      std::vector<float> w(c);
      for (auto& v : w) v = static_cast<float>(rng.uniform(0.0, 2.0));
      head.weights.push_back(std::move(w));
    }
    const Tensor x = oracle::random_tensor(rng, {3, 12, 12});
    const Tensor y = oracle::random_tensor(rng, {3, 12, 12});
    const Tensor z = oracle::random_tensor(rng, {3, 12, 12});
    const FeatureStack fx = forward(cfg, weights, x), fy = forward(cfg, weights, y), fz = forward(cfg, weights, z);
    if (distance(head, fx, fx) == 0.0) ++identity;
    if (distance(head, fx, fy) >= 0.0) ++nonneg;
    if (distance(head, fx, fy) == distance(head, fy, fx)) ++symmetric;
    LinearHead scaled = head;
    const float alpha = static_cast<float>(std::exp(rng.uniform(-4.0, 4.0)));
    for (auto& lv : scaled.weights)
      for (auto& w : lv) w *= alpha;
    const bool before = distance(head, fx, fy) < distance(head, fx, fz);
    const bool after = distance(scaled, fx, fy) < distance(scaled, fx, fz);
    if (before == after) ++scale;
  }
  return {identity == 100 && nonneg == 100 && symmetric == 100 && scale == 100,
          "d(x,x)=0 " + std::to_string(identity) + "/100, d>=0 " + std::to_string(nonneg) + "/100, symmetric " +
              std::to_string(symmetric) + "/100, rank kept under head scaling " + std::to_string(scale) + "/100"};
}

Outcome shift_damping() {
  const BackboneConfig base = preset("alex-baseline"), st = preset("alex-st");
  const WeightStore weights = random_weights(base, 0);
  Rng rng(606);
  std::vector<Tensor> images;
  for (int i = 0; i < 50; ++i) images.push_back(smoothed_noise(rng, 3, 64));
  std::vector<int> wins(images.size(), 0);
  std::vector<double> db(images.size()), ds(images.size());
  parallel_for(images.size(), eval_threads(), [&](std::size_t i) {
    db[i] = mean_shift_difference(base, weights, images[i], 1);
    ds[i] = mean_shift_difference(st, weights, images[i], 1);
    wins[i] = ds[i] < db[i] ? 1 : 0;
  });
  int total = 0;
  double mean_b = 0.0, mean_s = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    total += wins[i];
    mean_b += db[i] / static_cast<double>(images.size());
    mean_s += ds[i] / static_cast<double>(images.size());
  }
  return {total >= 45, std::to_string(total) + "/50 images with smaller alex-st difference (mean " +
                           fmt("%.4f", mean_s) + " vs " + fmt("%.4f", mean_b) + ")"};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto train = synth_dataset(1001, 200, 64);
  const auto test = synth_dataset(1, 200, 64);
  const std::vector<std::size_t> shifts{1, 2, 3};
  struct Result {
    EvalReport report;
  };
  auto run = [&](const std::string& name) {
    const BackboneConfig cfg = preset(name);
    const WeightStore weights = random_weights(cfg, 0);
    std::vector<TripletSample> samples;
    for (const auto& t : train) samples.push_back(t.sample);
    TrainOpts opts;
    opts.seed = 7;
    const LinearHead head = train_head(cfg, weights, samples, opts);
    return build_report(score_dataset(cfg, weights, head, test, shifts, eval_threads()));
  };
  const EvalReport b = run("alex-baseline");
  const EvalReport s = run("alex-st");
  const double secs = seconds_since(t0);
  bool pass = std::abs(s.two_afc - b.two_afc) <= 2.0 && secs < 600.0;
  std::string detail;
  for (std::size_t k : shifts) {
    pass = pass && s.rrf.at(k) < b.rrf.at(k);
    detail += "r_rf(" + std::to_string(k) + "px) " + fmt("%.2f", b.rrf.at(k)) + " -> " + fmt("%.2f", s.rrf.at(k)) + "; ";
  }
  detail += "2AFC " + fmt("%.2f", b.two_afc) + " -> " + fmt("%.2f", s.two_afc) + "; " + fmt("%.1f", secs) + " s";
  return {pass, detail};
}

Outcome shape_contract() {
  Rng rng(808);
  int ok = 0, total = 0;
  for (std::size_t w = 7; w <= 20; ++w)
    for (std::size_t k = 0; k <= 3; ++k) {
      const std::size_t h = oracle::random_between(rng, 1, 9);
      TripletSample t{oracle::random_tensor(rng, {3, h, w}), oracle::random_tensor(rng, {3, h, w}),
                      oracle::random_tensor(rng, {3, h, w}), 0.5};
      const ShiftedSample s = shift_crop(t, k);
      bool all = true;
      for (const Tensor* img :
           {&s.original.ref, &s.original.p0, &s.original.p1, &s.shifted.ref, &s.shifted.p0, &s.shifted.p1})
        all = all && img->dims() == Dims{3, h, w - 3};
      ok += all ? 1 : 0;
      ++total;
    }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " (w, k) cases with width w-3"};
}

Outcome scorer_fixtures() {
  int ok = 0;
  const std::vector<RankScores> rrf{{0.2, 0.5, 0.2, 0.5}, {0.5, 0.2, 0.1, 0.3}};
  ok += rank_flip_rate(rrf) == 50.0;
  const std::vector<RankScores> same{{0.1, 0.4, 0.1, 0.4}, {0.3, 0.2, 0.3, 0.2}};
  ok += rank_flip_rate(same) == 0.0;
  const std::vector<RankScores> flipped{{0.1, 0.4, 0.5, 0.4}, {0.3, 0.2, 0.1, 0.2}};
  ok += rank_flip_rate(flipped) == 100.0;
  ok += two_afc_credit({0.3, 0.1, 0.8}) == 0.8;
  ok += two_afc_credit({0.25, 0.25, 0.9}) == 0.5;
  const std::vector<JndPair> four{{0.9, false}, {0.8, true}, {0.2, false}, {0.1, true}};
  ok += std::abs(jnd_map(four) - (1.0 + 2.0 / 3.0) / 2.0) < 1e-15;
  const std::vector<JndPair> perfect{{0.9, false}, {0.5, false}, {0.2, true}};
  ok += jnd_map(perfect) == 1.0;
  const std::vector<std::pair<std::string, double>> cats{{"A", 1.0}, {"A", 1.0}, {"B", 0.0}};
  ok += aggregate_by_category(cats).overall == 0.5;
  return {ok == 8, std::to_string(ok) + "/8 hand-computed fixtures reproduced"};
}

Outcome weight_format() {
  Rng rng(909);
  int identical = 0;
  for (int trial = 0; trial < 100; ++trial) {
    WeightStore s;
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      Dims dims(1 + rng.below(4));
      for (auto& d : dims) d = 1 + rng.below(5);
      Tensor t(dims);
      for (auto& v : t.data()) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.bits()));
      s.set("t" + std::to_string(rng.below(100000)), std::move(t));
    }
    const auto bytes = serialize_weights(s);
    const WeightStore back = parse_weights(bytes);
    if (back == s && serialize_weights(back) == bytes) ++identical;
  }
  WeightStore one;
  one.set("w", Tensor({2, 2}, 1.0f));
  auto bytes = serialize_weights(one);
  bytes[0] ^= 0xFF;
  bool clean = false;
  try {
    parse_weights(bytes);
  } catch (const FormatError& e) {
    clean = e.field() == "magic";
  }
  return {identical == 100 && clean, std::to_string(identical) + "/100 round trips bitwise identical, corrupted magic " +
                                         (clean ? "rejected with a format error" : "NOT rejected cleanly")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"operator-oracles", operator_oracles},
      {"maxpool-decomposition", decomposition_identity},
      {"equivariance-and-shift-consistency", equivariance},
      {"gradient-correctness", gradient_correctness},
      {"metric-axioms", metric_axioms},
      {"shift-damping", shift_damping},
      {"end-to-end-direction", end_to_end},
      {"shift-crop-shape", shape_contract},
      {"scorer-fixtures", scorer_fixtures},
      {"weight-format", weight_format},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
