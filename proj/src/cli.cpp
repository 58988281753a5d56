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

#include "stim/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stim/config.hpp"
#include "stim/dataset.hpp"
#include "stim/error.hpp"
#include "stim/eval.hpp"
#include "stim/image.hpp"
#include "stim/metric.hpp"
#include "stim/parallel.hpp"
#include "stim/report.hpp"
#include "stim/weights.hpp"

namespace stim {
namespace {

namespace fs = std::filesystem;

struct ModelArgs {
  std::string backbone = "alex-st";
  std::string weights;
  std::uint64_t seed = 0;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--backbone", m.backbone, "Preset name or backbone JSON file")->capture_default_str();
  cmd->add_option("--weights", m.weights, "STPW file with backbone (and optionally head) weights");
  cmd->add_option("--weight-seed", m.seed, "Seed for random backbone weights when --weights is absent")
      ->capture_default_str();
}

struct Model {
  BackboneConfig cfg;
  WeightStore weights;
  LinearHead head;
  bool trained_head = false;
};

Model load_model(const ModelArgs& m) {
  Model model;
  model.cfg = resolve_backbone(m.backbone);
  model.weights = m.weights.empty() ? random_weights(model.cfg, m.seed) : load_weights(m.weights);
  for (const auto& [name, dims] : weight_inventory(model.cfg)) {
    if (!model.weights.contains(name)) throw WeightNotFound(name);
    if (model.weights.get(name).dims() != dims)
      throw FormatError(name, "expected dims " + to_string(dims) + ", file has " +
                                  to_string(model.weights.get(name).dims()));
  }
  if (LinearHead::present_in(model.weights)) {
    model.head = LinearHead::from_store(model.weights);
    const auto channels = level_channels(model.cfg);
    if (model.head.levels() != channels.size())
      throw FormatError("head", "head has " + std::to_string(model.head.levels()) + " levels, backbone " +
                                    std::to_string(channels.size()));
    for (std::size_t l = 0; l < channels.size(); ++l)
      if (model.head.weights[l].size() != channels[l])
        throw FormatError("head.level" + std::to_string(l), "channel count mismatch");
    model.trained_head = true;
  } else {
    model.head = LinearHead::constant(level_channels(model.cfg), 1.0f);
  }
  return model;
}

std::vector<std::size_t> parse_shifts(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "none") return out;
  for (const std::string& part : split_csv_line(text)) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size() || v > kMaxShift)
      throw CLI::ValidationError("--shifts", "expected integers in 0..3, got '" + part + "'");
    out.push_back(v);
  }
  return out;
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shift-tolerant perceptual similarity metric"};
  app.require_subcommand(1);

  // compare
  ModelArgs compare_model;
  std::string compare_ref, compare_img;
  auto* compare = app.add_subcommand("compare", "Print the distance between two images");
  compare->add_option("ref", compare_ref, "Reference image (PPM)")->required();
  compare->add_option("img", compare_img, "Image to compare (PPM)")->required();
  add_model_options(compare, compare_model);

  // eval
  ModelArgs eval_model;
  std::string eval_manifest, eval_scores, eval_scores_out, eval_jnd, eval_shifts = "1,2,3",
                                                                   eval_format = "table";
  auto* eval = app.add_subcommand("eval", "Score a triplet dataset: 2AFC and rank-flip rates");
  auto* eval_src = eval->add_option("--manifest", eval_manifest, "Triplet manifest CSV");
  eval->add_option("--scores", eval_scores, "Precomputed per-sample scores CSV")->excludes(eval_src);
  eval->add_option("--scores-out", eval_scores_out, "Write per-sample scores CSV here");
  eval->add_option("--jnd", eval_jnd, "JND manifest to add mAP to the report");
  eval->add_option("--shifts", eval_shifts, "Comma-separated shifts in pixels")->capture_default_str();
  eval->add_option("--format", eval_format, "table or csv")->capture_default_str();
  add_model_options(eval, eval_model);

  // train-head
  ModelArgs train_model;
  std::string train_manifest, train_out;
  std::size_t train_synth = 0, train_size = 64;
  std::string train_optimizer = "adam";
  TrainOpts opts;
  auto* train = app.add_subcommand("train-head", "Fit the per-channel head on preference data");
  auto* train_src = train->add_option("--manifest", train_manifest, "Triplet manifest CSV");
  train->add_option("--synth", train_synth, "Train on this many synthetic triplets instead")
      ->excludes(train_src);
  train->add_option("--size", train_size, "Synthetic image size")->capture_default_str();
  train->add_option("--seed", opts.seed, "Seed for dropout, batching and synthetic data")
      ->capture_default_str();
  train->add_option("--out", train_out, "Output STPW (backbone + head)")->required();
  train->add_option("--steps", opts.steps)->capture_default_str();
  train->add_option("--lr", opts.learning_rate)->capture_default_str();
  train->add_option("--dropout", opts.dropout)->capture_default_str();
  train->add_option("--batch", opts.batch_size, "0 for full batch")->capture_default_str();
  train->add_option("--optimizer", train_optimizer, "adam or gd")->capture_default_str();
  add_model_options(train, train_model);

  // jnd
  ModelArgs jnd_model;
  std::string jnd_manifest;
  auto* jnd = app.add_subcommand("jnd", "Average precision on same/different pairs");
  jnd->add_option("--manifest", jnd_manifest, "JND manifest CSV")->required();
  add_model_options(jnd, jnd_model);

  // synth
  std::uint64_t synth_seed = 1;
  std::size_t synth_n = 200, synth_size = 64;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic triplet dataset");
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--n", synth_n)->capture_default_str();
  synth->add_option("--size", synth_size)->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();

  // diffmaps
  ModelArgs diff_model;
  std::string diff_img, diff_out;
  std::size_t diff_k = 1;
  auto* diff = app.add_subcommand("diffmaps", "Export per-level shift difference maps");
  diff->add_option("img", diff_img, "Input image (PPM)")->required();
  diff->add_option("--k", diff_k, "Shift in pixels")->capture_default_str();
  diff->add_option("--out", diff_out, "Output directory")->required();
  add_model_options(diff, diff_model);

  // describe
  std::string describe_backbone = "alex-st";
  bool describe_json = false;
  auto* desc = app.add_subcommand("describe", "Print a backbone's layers and shapes");
  desc->add_option("--backbone", describe_backbone)->capture_default_str();
  desc->add_flag("--json", describe_json, "Print the JSON form instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (compare->parsed()) {
      const Model m = load_model(compare_model);
      const FeatureStack a = forward(m.cfg, m.weights, decode_image(compare_ref));
      const FeatureStack b = forward(m.cfg, m.weights, decode_image(compare_img));
      out << real(distance(m.head, a, b)) << "\n";
    } else if (eval->parsed()) {
      const ReportFormat format = parse_report_format(eval_format);
      if (eval_manifest.empty() && eval_scores.empty())
        throw CLI::RequiredError("--manifest or --scores");
      std::vector<SampleScores> scores;
      std::optional<Model> model;
      if (!eval_scores.empty()) {
        scores = parse_scores_csv(read_text(eval_scores));
      } else {
        model = load_model(eval_model);
        if (!model->trained_head) err << "note: no head in weights, using unit weights\n";
        const std::vector<std::size_t> shifts = parse_shifts(eval_shifts);
        const auto data = load_triplets(read_triplet_manifest(eval_manifest));
        scores = score_dataset(model->cfg, model->weights, model->head, data, shifts, eval_threads());
      }
      if (!eval_scores_out.empty()) write_text(format_scores_csv(scores), eval_scores_out);
      EvalReport report = build_report(scores);
      if (!eval_jnd.empty()) {
        if (!model) model = load_model(eval_model);
        const auto rows = read_jnd_manifest(eval_jnd);
        std::vector<JndPair> pairs(rows.size());
        parallel_for(rows.size(), eval_threads(), [&](std::size_t i) {
          pairs[i] = {distance(model->head, forward(model->cfg, model->weights, decode_image(rows[i].img_a)),
                               forward(model->cfg, model->weights, decode_image(rows[i].img_b))),
                      rows[i].same};
        });
        report.jnd_map = jnd_map(pairs);
      }
      out << format_report(report, format);
    } else if (train->parsed()) {
      if (train_optimizer == "adam") {
        opts.optimizer = Optimizer::adam;
      } else if (train_optimizer == "gd") {
        opts.optimizer = Optimizer::gradient_descent;
      } else {
        throw CLI::ValidationError("--optimizer", "expected adam or gd");
      }
      if (train_manifest.empty() && train_synth == 0) throw CLI::RequiredError("--manifest or --synth");
      Model m = load_model(train_model);
      const std::vector<LabeledTriplet> data = train_manifest.empty()
                                                   ? synth_dataset(opts.seed, train_synth, train_size)
                                                   : load_triplets(read_triplet_manifest(train_manifest));
      std::vector<TripletSample> samples;
      samples.reserve(data.size());
      for (const auto& t : data) samples.push_back(t.sample);
      std::vector<TripletDiffs> diffs(samples.size());
      parallel_for(samples.size(), eval_threads(),
                   [&](std::size_t i) { diffs[i] = triplet_diffs(m.cfg, m.weights, samples[i]); });
      const LinearHead init = LinearHead::constant(level_channels(m.cfg), opts.initial_weight);
      const LinearHead head = train_head(diffs, opts, init);
      out << "loss " << real(preference_loss(init, diffs)) << " -> " << real(preference_loss(head, diffs))
          << "\n";
      WeightStore store = m.weights;
      head.store_into(store);
      save_weights(store, train_out);
    } else if (jnd->parsed()) {
      const Model m = load_model(jnd_model);
      const auto rows = read_jnd_manifest(jnd_manifest);
      std::vector<JndPair> pairs(rows.size());
      parallel_for(rows.size(), eval_threads(), [&](std::size_t i) {
        pairs[i] = {distance(m.head, forward(m.cfg, m.weights, decode_image(rows[i].img_a)),
                             forward(m.cfg, m.weights, decode_image(rows[i].img_b))),
                    rows[i].same};
      });
      out << real(jnd_map(pairs)) << "\n";
    } else if (synth->parsed()) {
      write_triplet_dataset(synth_dataset(synth_seed, synth_n, synth_size), synth_out);
      out << "wrote " << synth_n << " triplets to " << (fs::path(synth_out) / "manifest.csv").string() << "\n";
    } else if (diff->parsed()) {
      const Model m = load_model(diff_model);
      const auto maps = difference_maps(m.cfg, m.weights, decode_image(diff_img), diff_k);
      fs::create_directories(diff_out);
      for (std::size_t l = 0; l < maps.size(); ++l) {
        write_pgm(maps[l], fs::path(diff_out) / ("level" + std::to_string(l) + ".pgm"));
        double sum = 0.0;
        for (const float v : maps[l].data()) sum += v;
        out << "level " << l << " " << to_string(maps[l].dims()) << " mean "
            << real(sum / static_cast<double>(maps[l].size())) << "\n";
      }
    } else if (desc->parsed()) {
      const BackboneConfig cfg = resolve_backbone(describe_backbone);
      out << (describe_json ? backbone_to_json(cfg) : describe(cfg));
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace stim
