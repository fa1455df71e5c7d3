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

#include <filesystem>
#include <optional>
#include <vector>

#include "ttaforge/core.hpp"
#include "ttaforge/idm.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

struct HallucinationConfig {
  int max_instances = 3;
  double th_iou = 0.2;
  int max_retries = 10;
  double beta_a = 8.0;
  double beta_b = 2.0;
  double scale_lo = 0.5;
  double scale_hi = 1.5;
  /// When set, used instead of a Beta draw.
  std::optional<double> fixed_lambda;

  void validate() const;

  friend bool operator==(const HallucinationConfig&, const HallucinationConfig&) = default;
};

struct Hallucination {
  Image image;
  std::vector<Target> labels;
  /// Mixing coefficient of each emitted label, same order.
  std::vector<double> lambdas;
  /// Set when the memory was empty; image is then the unchanged input.
  bool no_memory = false;
  /// Instances dropped after exhausting their placement retries.
  int dropped = 0;
};

/// Pastes 1..max_instances memory instances onto `negative` at random,
/// pairwise-IoU-constrained positions with random scale and a Beta-sampled
/// mixing coefficient per instance. Each pasted instance becomes a label
/// weighted by its stored score.
Hallucination hallucinate(const Image& negative, const InstanceMemory& memory, const HallucinationConfig& config,
                          Rng& rng);

/// lambda * instance + (1 - lambda) * region, elementwise.
Image blend(const Image& region, const Image& instance, double lambda);

/// Writes the image with label rectangles drawn on top (debug aid).
void dump_hallucination(const std::filesystem::path& path, const Hallucination& h);

}  // namespace ttaforge
