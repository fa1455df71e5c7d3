/**
 * Copyright 2026 The ttaforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ttaforge/app.hpp"

#include <chrono>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "ttaforge/config.hpp"
#include "ttaforge/error.hpp"
#include "ttaforge/kernels.hpp"
#include "ttaforge/toy_embedder.hpp"

#ifndef TTAFORGE_VERSION
#define TTAFORGE_VERSION "unknown"
#endif

namespace ttaforge {

namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_json(const std::filesystem::path& path, const ojson& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

std::string ckpt_name(const char* who, std::int64_t step) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_step%06lld.bin", who, static_cast<long long>(step));
  return buf;
}

ojson recipe_json(const DetectorRecipe& r) {
  return {{"patch", r.options.patch},
          {"dim", r.options.dim},
          {"layers", r.options.layers},
          {"seed", r.options.seed},
          {"source_images", r.source_images},
          {"source_seed", r.source_seed},
          {"ridge", r.fit.ridge},
          {"positive_weight", r.fit.positive_weight},
          {"newton_iterations", r.fit.newton_iterations},
          {"offset_clip", r.fit.offset_clip}};
}

DetectorRecipe recipe_from_json(const nlohmann::json& j) {
  DetectorRecipe r;
  r.options.patch = j.at("patch").get<int>();
  r.options.dim = j.at("dim").get<int>();
  r.options.layers = j.at("layers").get<int>();
  r.options.seed = j.at("seed").get<std::uint64_t>();
  r.source_images = j.at("source_images").get<std::size_t>();
  r.source_seed = j.at("source_seed").get<std::uint64_t>();
  r.fit.ridge = j.at("ridge").get<double>();
  r.fit.positive_weight = j.at("positive_weight").get<double>();
  r.fit.newton_iterations = j.at("newton_iterations").get<int>();
  r.fit.offset_clip = j.at("offset_clip").get<double>();
  return r;
}

void require_shape_categories(const Dataset& ds) {
  if (ds.categories.names() != shape_categories().names()) {
    throw FormatError(ds.root.string() + ": categories do not match the detector's (" + shape_categories().caption() +
                      ")");
  }
}

}  // namespace

ToyDetector build_detector(const DetectorRecipe& recipe) {
  const auto source = source_training_set(recipe.source_images, recipe.source_seed, 64);
  return ToyDetector::pretrained(shape_categories(), recipe.options, source, recipe.fit);
}

std::string to_string(SeedSource source) {
  switch (source) {
    case SeedSource::flag:
      return "flag";
    case SeedSource::env:
      return "env";
    case SeedSource::config:
      return "config";
    case SeedSource::fallback:
      return "default";
  }
  return "default";
}

ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config,
                          std::uint64_t fallback) {
  if (flag) return {*flag, SeedSource::flag};
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError(std::string(kSeedEnv) + " must be an unsigned integer, got '" + s + "'");
    }
    return {v, SeedSource::env};
  }
  if (config) return {*config, SeedSource::config};
  return {fallback, SeedSource::fallback};
}

void cmd_gen(const GenOptions& options, std::ostream& log) {
  const auto t0 = Clock::now();
  SyntheticSpec spec;
  spec.num_images = options.num_images;
  spec.size = options.size;
  spec.shift = TargetShift::parse(options.target_shift);
  const ResolvedSeed seed = resolve_seed(options.seed, std::nullopt, 1);
  spec.seed = seed.value;
  spec.validate();

  std::filesystem::create_directories(options.out);
  ojson manifest;
  manifest["tool"] = "ttaforge";
  manifest["version"] = TTAFORGE_VERSION;
  manifest["command"] = "gen";
  manifest["status"] = "running";
  manifest["num_images"] = spec.num_images;
  manifest["size"] = spec.size;
  manifest["target_shift"] = spec.shift.name();
  manifest["seed"] = {{"value", seed.value}, {"source", to_string(seed.source)}};
  write_json(options.out / "manifest.json", manifest);

  generate(spec, options.out);

  manifest["status"] = "complete";
  manifest["timings"] = {{"total_s", seconds_since(t0)}};
  manifest["outputs"] = {"annotations.json", "images/"};
  write_json(options.out / "manifest.json", manifest);
  log << "wrote " << spec.num_images << " images (" << spec.shift.name() << ") to " << options.out.string() << '\n';
}

std::vector<PredictionRecord> to_records(const Dataset& dataset, const StreamResult& result) {
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < result.predictions.size(); ++i) {
    for (const auto& d : result.predictions[i]) out.push_back({dataset.images.at(i).id, d.box, d.score, d.label});
  }
  return out;
}

RunSummary cmd_run(const RunOptions& options, std::ostream& log) {
  const auto t0 = Clock::now();
  RunSummary summary;

  AdaptationConfig cfg;
  std::optional<std::uint64_t> config_seed;
  if (options.config_override) {
    cfg = *options.config_override;
    config_seed = cfg.seed;
  } else if (options.config) {
    const auto parsed = load_config(*options.config);
    cfg = parsed.config;
    if (parsed.has("seed")) config_seed = cfg.seed;
  }
  summary.seed = resolve_seed(options.seed, config_seed, 0);
  cfg.seed = summary.seed.value;
  cfg.validate();

  const Dataset dataset = load_dataset(options.data);
  require_shape_categories(dataset);

  std::filesystem::create_directories(options.out / "prompts");
  ojson manifest;
  manifest["tool"] = "ttaforge";
  manifest["version"] = TTAFORGE_VERSION;
  manifest["command"] = "run";
  manifest["status"] = "running";
  manifest["mode"] = to_string(options.mode);
  manifest["seed"] = {{"value", summary.seed.value}, {"source", to_string(summary.seed.source)}};
  manifest["data"] = std::filesystem::absolute(options.data).string();
  manifest["out"] = std::filesystem::absolute(options.out).string();
  manifest["config_file"] = options.config ? std::filesystem::absolute(*options.config).string() : "";
  manifest["config"] = render_config(cfg);
  manifest["detector"] = {
      {"weights", options.weights ? std::filesystem::absolute(*options.weights).string() : ""},
      {"recipe", recipe_json(options.recipe)}};
  manifest["checkpoint_every"] = options.checkpoint_every;
  manifest["dump_memory"] = options.dump_memory;
  manifest["openmp_threads"] = kernels::max_threads();
  write_json(options.out / "manifest.json", manifest);

  const auto t_load = Clock::now();
  const ToyDetector detector = options.weights ? ToyDetector::load(*options.weights, shape_categories())
                                               : build_detector(options.recipe);
  detector.save(options.out / "weights.bin");
  const ToyEmbedder embedder;
  const std::vector<Image> images = dataset.load_images();
  const double load_s = seconds_since(t_load);

  {
    std::ofstream cfg_out(options.out / "config.txt", std::ios::binary);
    cfg_out << render_config(cfg);
  }

  const auto t_run = Clock::now();
  std::ofstream steps(options.out / "steps.jsonl", std::ios::binary);
  if (!steps) throw Error("cannot write " + (options.out / "steps.jsonl").string());
  AdaptationState state = make_state(detector, cfg);
  const Backends backends{detector, embedder};
  const auto on_step = [&](const StepReport& report, const AdaptationState& s) {
    steps << to_json_line(report, detector.categories()) << '\n';
    if (options.checkpoint_every > 0 && !report.skipped && s.step % static_cast<std::int64_t>(options.checkpoint_every) == 0) {
      save_prompts(options.out / "prompts" / ckpt_name("teacher", s.step), s.teacher, cfg.seed);
      save_prompts(options.out / "prompts" / ckpt_name("student", s.step), s.student, cfg.seed);
    }
  };
  const StreamResult result = run_stream(images, state, backends, cfg, options.mode, on_step);
  steps.close();
  if (!steps) throw Error("failed writing " + (options.out / "steps.jsonl").string());
  save_prompts(options.out / "prompts" / "teacher_final.bin", state.teacher, cfg.seed);
  save_prompts(options.out / "prompts" / "student_final.bin", state.student, cfg.seed);
  if (options.dump_memory) state.memory.dump(options.out / "memory", detector.categories());
  const double run_s = seconds_since(t_run);

  // Metrics come from the saved file so `eval` on it reproduces them exactly.
  const auto t_eval = Clock::now();
  save_predictions(options.out / "predictions.jsonl", to_records(dataset, result));
  const auto reloaded = load_predictions(options.out / "predictions.jsonl", dataset.categories.size());
  summary.metrics = compute_metrics(reloaded, dataset.annotations, dataset.categories);
  write_metrics_csv(options.out / "metrics.csv", summary.metrics);
  write_pr_curve_csv(options.out / "pr_curve.csv", summary.metrics.at_threshold);
  const double eval_s = seconds_since(t_eval);

  summary.config = cfg;
  summary.images = images.size();
  summary.steps = result.reports.size();
  for (const auto& r : result.reports) summary.skipped_steps += r.skipped ? 1 : 0;

  manifest["status"] = "complete";
  manifest["timings"] = {{"load_s", load_s}, {"run_s", run_s}, {"eval_s", eval_s}, {"total_s", seconds_since(t0)}};
  manifest["outputs"] = {"manifest.json", "config.txt",  "weights.bin", "steps.jsonl",
                         "predictions.jsonl", "metrics.csv", "pr_curve.csv", "prompts/"};
  manifest["results"] = {{"images", summary.images},
                         {"steps", summary.steps},
                         {"skipped_steps", summary.skipped_steps},
                         {"ap50", summary.metrics.ap},
                         {"map", summary.metrics.map}};
  write_json(options.out / "manifest.json", manifest);

  log << to_string(options.mode) << ": images=" << summary.images << " steps=" << summary.steps
      << " AP50=" << format_number(summary.metrics.ap) << " mAP=" << format_number(summary.metrics.map) << '\n';
  return summary;
}

RunSummary replay_run(const std::filesystem::path& manifest_path, const std::filesystem::path& out, std::ostream& log) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw FormatError(manifest_path.string() + ": cannot open");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
    if (m.at("command").get<std::string>() != "run") throw FormatError(manifest_path.string() + ": not a run manifest");
    RunOptions o;
    o.mode = parse_run_mode(m.at("mode").get<std::string>());
    o.data = m.at("data").get<std::string>();
    o.out = out;
    o.seed = m.at("seed").at("value").get<std::uint64_t>();
    o.config_override = parse_config(m.at("config").get<std::string>(), manifest_path.string()).config;
    const auto weights = m.at("detector").at("weights").get<std::string>();
    if (!weights.empty()) o.weights = weights;
    o.recipe = recipe_from_json(m.at("detector").at("recipe"));
    o.checkpoint_every = m.at("checkpoint_every").get<std::size_t>();
    o.dump_memory = m.at("dump_memory").get<bool>();
    return cmd_run(o, log);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
}

Metrics cmd_eval(const EvalOptions& options, std::ostream& log) {
  const Dataset dataset = load_dataset(options.data);
  const auto predictions = load_predictions(options.predictions, dataset.categories.size());
  const Metrics metrics = compute_metrics(predictions, dataset.annotations, dataset.categories, options.iou);
  std::filesystem::create_directories(options.out);
  write_metrics_csv(options.out / "metrics.csv", metrics);
  write_pr_curve_csv(options.out / "pr_curve.csv", metrics.at_threshold);
  if (options.histogram_bins) write_histogram_csv(options.out / "tp_fp_hist.csv", metrics.at_threshold, *options.histogram_bins);
  log << "eval: AP" << static_cast<int>(options.iou * 100 + 0.5) << "=" << format_number(metrics.ap)
      << " mAP=" << format_number(metrics.map) << '\n';
  return metrics;
}

}  // namespace ttaforge
