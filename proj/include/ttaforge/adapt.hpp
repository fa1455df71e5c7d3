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
#pragma once

// Online mean-teacher adaptation over prompt tensors. The stream is
// consumed batch by batch: predictions for a batch are produced first, then
// the batch is used for one update.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ttaforge/augment.hpp"
#include "ttaforge/backend.hpp"
#include "ttaforge/enhance.hpp"
#include "ttaforge/halluc.hpp"
#include "ttaforge/idm.hpp"
#include "ttaforge/optimizer.hpp"
#include "ttaforge/prompts.hpp"

namespace ttaforge {

enum class RunMode { direct, adapt };
enum class EvalSource { teacher, student };

RunMode parse_run_mode(const std::string& text);
std::string to_string(RunMode mode);
EvalSource parse_eval_source(const std::string& text);
std::string to_string(EvalSource source);

struct AdaptationConfig {
  double th_pl = 0.3;
  double th_me = 0.3;
  double gamma = 0.999;
  std::size_t m = 10;
  std::size_t capacity = 20;
  double alpha = 5.0;
  double beta = 5.0;
  double lr_text = 0.02;
  double lr_visual = 0.2;
  std::size_t batch_size = 4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;

  double warm_noise = 1e-4;
  double nms_iou = 0.5;
  bool enable_enhancement = true;
  bool enable_hallucination = true;
  EvalSource eval_with = EvalSource::teacher;
  AugmentationSpec augment;
  HallucinationConfig halluc;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  AffinityParams affinity() const { return {alpha, beta, th_me}; }
  AdamWOptions adamw() const { return {adam_beta1, adam_beta2, adam_eps, weight_decay}; }
  bool uses_memory() const { return enable_enhancement || enable_hallucination; }

  friend bool operator==(const AdaptationConfig&, const AdaptationConfig&) = default;
};

struct AdaptationState {
  PromptSet student;
  PromptSet teacher;
  AdamW optimizer;
  std::int64_t step = 0;
  InstanceMemory memory{0, 0};
  bool warm_started = false;
  WarmStartRecord warm;
};

/// Fresh state: zero prompts with m tokens per layer, empty memory.
AdaptationState make_state(const DetectorBackend& detector, const AdaptationConfig& config);

struct Backends {
  const DetectorBackend& detector;
  const FeatureEmbedder& embedder;
};

struct StepReport {
  std::int64_t step = 0;
  std::size_t images = 0;
  double loss_cls = 0.0;
  double loss_loc = 0.0;
  std::size_t pseudo_labels = 0;
  /// Images whose targets came from hallucination.
  std::size_t hallucinated = 0;
  std::size_t hallucinated_instances = 0;
  std::size_t harvested = 0;
  std::vector<std::size_t> memory;
  bool skipped = false;
  std::string error;

  friend bool operator==(const StepReport&, const StepReport&) = default;
};

/// Single-line JSON rendering of a report.
std::string to_json_line(const StepReport& report, const CategorySpace& categories);

/// Class-agnostic greedy NMS: keeps detections in descending score order
/// (input order on ties), dropping any with IoU > iou_threshold against a
/// kept one.
std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold);

/// NMS, then keeps detections scoring strictly above th_pl.
std::vector<Detection> pseudo_label_detections(std::span<const Detection> detections, double th_pl,
                                               double nms_iou = 0.5);

/// Same selection as pseudo_label_detections, as unit-weight targets.
std::vector<Target> filter_pseudo_labels(std::span<const Detection> detections, double th_pl, double nms_iou = 0.5);

/// Warm-starts the visual prompts on `first_image` if not done yet and
/// copies student to teacher.
void ensure_warm_start(const Image& first_image, std::int64_t image_index, AdaptationState& state,
                       const Backends& backends, const AdaptationConfig& config);

/// One update on a batch whose first image has stream index `first_index`.
/// A non-finite loss skips the update and is reported.
StepReport adapt_step(std::span<const Image> batch, std::int64_t first_index, AdaptationState& state,
                      const Backends& backends, const AdaptationConfig& config);

/// Evaluation output for one image under the current state: NMS'd
/// predictions, enhanced with the current prototypes in adapt mode.
std::vector<Detection> evaluation_predictions(const Image& image, const AdaptationState& state,
                                              const Backends& backends, const AdaptationConfig& config, RunMode mode);

struct StreamResult {
  std::vector<std::vector<Detection>> predictions;
  std::vector<StepReport> reports;
};

using StepCallback = std::function<void(const StepReport&, const AdaptationState&)>;

/// Predict-then-adapt over the stream in fixed-size batches (the last one
/// may be shorter). Direct mode never updates anything.
StreamResult run_stream(std::span<const Image> stream, AdaptationState& state, const Backends& backends,
                        const AdaptationConfig& config, RunMode mode, const StepCallback& on_step = {});

}  // namespace ttaforge
