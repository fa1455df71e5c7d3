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

// The seam between the adaptation engine and a concrete detector. The
// engine only ever touches prompt tensors; everything behind this interface
// is frozen.

#include <span>
#include <vector>

#include "ttaforge/core.hpp"
#include "ttaforge/prompt_set.hpp"
#include "ttaforge/tensor.hpp"

namespace ttaforge {

struct LossResult {
  double loss_cls = 0.0;
  double loss_loc = 0.0;
  /// Gradient of loss_cls + loss_loc w.r.t. every prompt tensor.
  PromptSet grad;
  /// Targets that were assigned to a token (targets overlapping no token are ignored).
  std::size_t assigned = 0;

  double total() const { return loss_cls + loss_loc; }
};

class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;

  virtual const CategorySpace& categories() const = 0;
  /// Encoder layers N; one visual prompt block per layer.
  virtual std::size_t num_layers() const = 0;
  virtual std::size_t token_dim(std::size_t layer) const = 0;
  virtual std::size_t text_dim() const = 0;
  virtual std::size_t max_text_tokens() const = 0;
  /// Input height and width must be multiples of this.
  virtual int input_multiple() const = 0;

  /// Layer-0 image tokens.
  virtual Matrix tokenize(const Image& image) const = 0;
  /// Runs encoder layer `layer` (0-based) on image tokens with `prompt`
  /// prepended; returns the image-token positions only.
  virtual Matrix encode_layer(std::size_t layer, const Matrix& tokens, const Matrix& prompt) const = 0;

  /// Deterministic given (image, prompts). Sorted by score, descending.
  virtual std::vector<Detection> predict(const Image& image, const PromptSet& prompts) const = 0;
  /// Throws NonFiniteLoss when the loss is NaN or Inf.
  virtual LossResult loss_and_grad(const Image& image, std::span<const Target> targets,
                                   const PromptSet& prompts) const = 0;

  /// Zero text prompt and `m` zero prompt tokens per layer.
  PromptSet zero_prompts(std::size_t m) const;
};

class FeatureEmbedder {
 public:
  virtual ~FeatureEmbedder() = default;
  virtual std::size_t dim() const = 0;
  /// Unit-norm feature of an instance crop.
  virtual std::vector<double> embed(const Image& crop) const = 0;
};

}  // namespace ttaforge
