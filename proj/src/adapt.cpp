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
#include "ttaforge/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>

#include "json.hpp"

#include "ttaforge/error.hpp"

namespace ttaforge {

namespace {

// Stream ids for the per-image generators.
constexpr std::uint64_t kWarmStream = 0x5741524D;
constexpr std::uint64_t kImageStream = 0x494D4147;

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

struct PreparedImage {
  Image student_view;
  std::vector<Target> targets;
  std::size_t pseudo_labels = 0;
  std::size_t hallucinated_instances = 0;
  bool hallucinated = false;
  std::size_t harvested = 0;
};

const PromptSet& eval_prompts(const AdaptationState& state, const AdaptationConfig& config) {
  return config.eval_with == EvalSource::teacher ? state.teacher : state.student;
}

}  // namespace

RunMode parse_run_mode(const std::string& text) {
  if (text == "direct") return RunMode::direct;
  if (text == "adapt") return RunMode::adapt;
  throw ConfigError("unknown mode '" + text + "' (expected direct or adapt)");
}

std::string to_string(RunMode mode) { return mode == RunMode::direct ? "direct" : "adapt"; }

EvalSource parse_eval_source(const std::string& text) {
  if (text == "teacher") return EvalSource::teacher;
  if (text == "student") return EvalSource::student;
  throw ConfigError("unknown eval source '" + text + "' (expected teacher or student)");
}

std::string to_string(EvalSource source) { return source == EvalSource::teacher ? "teacher" : "student"; }

void AdaptationConfig::validate() const {
  if (!in_unit(th_pl)) throw ConfigError("th_pl must be in [0, 1]");
  if (!in_unit(th_me)) throw ConfigError("th_me must be in [0, 1]");
  if (!in_unit(gamma)) throw ConfigError("gamma must be in [0, 1]");
  if (!in_unit(nms_iou)) throw ConfigError("nms_iou must be in [0, 1]");
  // Zero learning rates are accepted so a frozen run can be compared with direct mode.
  if (!(lr_text >= 0.0) || !(lr_visual >= 0.0)) throw ConfigError("learning rates must be >= 0");
  if (capacity == 0) throw ConfigError("capacity must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("optimizer betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("optimizer eps must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(warm_noise >= 0.0)) throw ConfigError("warm_noise must be >= 0");
  if (!(std::isfinite(alpha) && alpha > 0.0) || !(std::isfinite(beta) && beta > 0.0)) {
    throw ConfigError("alpha and beta must be finite and positive");
  }
  halluc.validate();
}

AdaptationState make_state(const DetectorBackend& detector, const AdaptationConfig& config) {
  config.validate();
  config.augment.validate(detector.input_multiple());
  AdaptationState state;
  state.student = detector.zero_prompts(config.m);
  state.teacher = state.student;
  state.optimizer = AdamW(state.student, config.adamw());
  state.memory = InstanceMemory(detector.categories().size(), config.capacity);
  return state;
}

std::string to_json_line(const StepReport& report, const CategorySpace& categories) {
  nlohmann::ordered_json j;
  j["step"] = report.step;
  j["images"] = report.images;
  j["loss_cls"] = report.loss_cls;
  j["loss_loc"] = report.loss_loc;
  j["pseudo_labels"] = report.pseudo_labels;
  j["hallucinated"] = report.hallucinated;
  j["hallucinated_instances"] = report.hallucinated_instances;
  j["harvested"] = report.harvested;
  nlohmann::ordered_json mem = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < report.memory.size(); ++c) {
    mem[c < categories.size() ? categories.name(c) : std::to_string(c)] = report.memory[c];
  }
  j["memory"] = mem;
  j["skipped"] = report.skipped;
  if (!report.error.empty()) j["error"] = report.error;
  return j.dump();
}

std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const auto& d = detections[i];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) { return iou(k.box, d.box) > iou_threshold; });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> pseudo_label_detections(std::span<const Detection> detections, double th_pl, double nms_iou) {
  auto kept = nms(detections, nms_iou);
  std::erase_if(kept, [&](const Detection& d) { return !(d.score > th_pl); });
  return kept;
}

std::vector<Target> filter_pseudo_labels(std::span<const Detection> detections, double th_pl, double nms_iou) {
  std::vector<Target> out;
  for (const auto& d : pseudo_label_detections(detections, th_pl, nms_iou)) out.push_back({d.box, d.label, 1.0});
  return out;
}

namespace {

Rng image_rng(std::uint64_t seed, std::int64_t index) {
  return make_rng(seed, kImageStream ^ static_cast<std::uint64_t>(index) * 0x100000001B3ULL);
}

}  // namespace

void ensure_warm_start(const Image& first_image, std::int64_t image_index, AdaptationState& state,
                       const Backends& backends, const AdaptationConfig& config) {
  if (state.warm_started) return;
  // Pool over the same weak view the teacher gets for this image.
  Rng view_rng = image_rng(config.seed, image_index);
  const Augmented view = weak(first_image, config.augment, view_rng);
  Rng rng = make_rng(config.seed, kWarmStream);
  auto ws = warm_start_visual(view.image, backends.detector, config.m, config.warm_noise, rng, image_index);
  state.student.visual = std::move(ws.visual);
  state.warm = std::move(ws.record);
  state.teacher = state.student;
  state.optimizer = AdamW(state.student, config.adamw());
  state.warm_started = true;
}

StepReport adapt_step(std::span<const Image> batch, std::int64_t first_index, AdaptationState& state,
                      const Backends& backends, const AdaptationConfig& config) {
  StepReport report;
  report.step = state.step;
  report.images = batch.size();
  if (batch.empty()) {
    report.memory = state.memory.occupancy();
    return report;
  }
  ensure_warm_start(batch.front(), first_index, state, backends, config);

  const Prototypes prototypes = config.enable_enhancement ? state.memory.prototypes() : Prototypes{};
  const AffinityParams aff = config.affinity();

  std::vector<PreparedImage> prepared(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto index = first_index + static_cast<std::int64_t>(i);
    Rng rng = image_rng(config.seed, index);
    PreparedImage& p = prepared[i];

    const Augmented w = weak(batch[i], config.augment, rng);
    auto dets = backends.detector.predict(w.image, state.teacher);
    if (!prototypes.empty()) dets = enhance(w.image, dets, prototypes, backends.embedder, aff);
    const auto labels = pseudo_label_detections(dets, config.th_pl, config.nms_iou);
    p.pseudo_labels = labels.size();
    if (config.uses_memory()) {
      p.harvested = state.memory.harvest(w.image, labels, backends.embedder, config.th_pl, index).inserted.size();
    }

    Image source = w.image;
    std::vector<Target> targets;
    for (const auto& d : labels) targets.push_back({d.box, d.label, 1.0});
    if (labels.empty() && config.enable_hallucination && !state.memory.empty()) {
      auto h = hallucinate(w.image, state.memory, config.halluc, rng);
      if (!h.labels.empty()) {
        source = std::move(h.image);
        targets = std::move(h.labels);
        p.hallucinated = true;
        p.hallucinated_instances = targets.size();
      }
    }

    Augmented s = strong(source, config.augment, rng);
    for (auto& t : targets) t.box = s.transform.apply(t.box);
    p.student_view = std::move(s.image);
    p.targets = std::move(targets);
  }

  std::vector<std::optional<LossResult>> losses(batch.size());
  std::vector<std::string> errors(batch.size());
  const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      losses[k] = backends.detector.loss_and_grad(prepared[k].student_view, prepared[k].targets, state.student);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }

  PromptSet grad = state.student.zeros_like();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    report.pseudo_labels += prepared[i].pseudo_labels;
    report.hallucinated += prepared[i].hallucinated ? 1 : 0;
    report.hallucinated_instances += prepared[i].hallucinated_instances;
    report.harvested += prepared[i].harvested;
    if (!errors[i].empty()) {
      if (report.error.empty()) report.error = errors[i];
      report.skipped = true;
      continue;
    }
    report.loss_cls += losses[i]->loss_cls;
    report.loss_loc += losses[i]->loss_loc;
    grad.accumulate(losses[i]->grad);
  }
  report.memory = state.memory.occupancy();
  if (!report.skipped && (!std::isfinite(report.loss_cls) || !std::isfinite(report.loss_loc) || !grad.all_finite())) {
    report.skipped = true;
    report.error = "non-finite loss or gradient";
  }
  if (report.skipped) return report;

  state.optimizer.step(state.student, grad, config.lr_text, config.lr_visual);
  ema_update(state.teacher, state.student, config.gamma);
  ++state.step;
  return report;
}

std::vector<Detection> evaluation_predictions(const Image& image, const AdaptationState& state,
                                              const Backends& backends, const AdaptationConfig& config,
                                              RunMode mode) {
  if (mode == RunMode::direct) {
    const auto dets = backends.detector.predict(image, backends.detector.zero_prompts(0));
    return nms(dets, config.nms_iou);
  }
  auto dets = backends.detector.predict(image, eval_prompts(state, config));
  if (config.enable_enhancement) {
    const auto prototypes = state.memory.prototypes();
    if (!prototypes.empty()) dets = enhance(image, dets, prototypes, backends.embedder, config.affinity());
  }
  return nms(dets, config.nms_iou);
}

StreamResult run_stream(std::span<const Image> stream, AdaptationState& state, const Backends& backends,
                        const AdaptationConfig& config, RunMode mode, const StepCallback& on_step) {
  config.validate();
  StreamResult out;
  out.predictions.resize(stream.size());
  for (std::size_t start = 0; start < stream.size(); start += config.batch_size) {
    const std::size_t count = std::min(config.batch_size, stream.size() - start);
    const auto batch = stream.subspan(start, count);
    if (mode == RunMode::adapt) ensure_warm_start(batch.front(), static_cast<std::int64_t>(start), state, backends, config);

    const auto n = static_cast<std::int64_t>(count);
    std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        out.predictions[start + k] = evaluation_predictions(batch[k], state, backends, config, mode);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw Error("prediction failed: " + e);
    }
    if (mode == RunMode::direct) continue;

    StepReport report = adapt_step(batch, static_cast<std::int64_t>(start), state, backends, config);
    if (on_step) on_step(report, state);
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace ttaforge
