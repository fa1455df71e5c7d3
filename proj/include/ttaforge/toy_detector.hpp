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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ttaforge/backend.hpp"
#include "ttaforge/container.hpp"
#include "ttaforge/kernels.hpp"

namespace ttaforge {

struct LabeledImage {
  Image image;
  std::vector<Target> objects;
};

struct ToyDetectorOptions {
  int patch = 8;
  int dim = 32;
  int layers = 2;
  std::uint64_t seed = 7;
  kernels::Execution execution = kernels::Execution::parallel;
};

/// Frozen weights, in serialization order.
struct ToyWeights {
  Matrix patch_proj;                // 3P^2 x d, no bias
  std::vector<Matrix> layer_weight;  // d x d each
  std::vector<Matrix> layer_bias;    // 1 x d each
  Matrix class_embedding;           // |C| x d
  Matrix loc_head;                  // d x 4

  friend bool operator==(const ToyWeights&, const ToyWeights&) = default;
};

/// Options for fitting the classification and box heads on labelled
/// source-domain images.
struct HeadFitOptions {
  double ridge = 1e-1;
  double positive_weight = 4.0;
  int newton_iterations = 30;
  double offset_clip = 0.9;
};

/// Desk-scale detector with a patch tokenizer, a prompt-aware encoder and a
/// dot-product class head. Weights are drawn from one seed and never change
/// after construction.
class ToyDetector final : public DetectorBackend {
 public:
  ToyDetector(CategorySpace categories, ToyDetectorOptions options);

  /// Seeded encoder with classification and box heads fitted on `source`.
  static ToyDetector pretrained(CategorySpace categories, ToyDetectorOptions options,
                                std::span<const LabeledImage> source, const HeadFitOptions& fit = {});

  static ToyDetector load(const std::filesystem::path& path, CategorySpace categories,
                          kernels::Execution execution = kernels::Execution::parallel);
  void save(const std::filesystem::path& path) const;
  TensorContainer to_container() const;

  const ToyWeights& weights() const { return weights_; }
  const ToyDetectorOptions& options() const { return options_; }
  int patch() const { return options_.patch; }

  const CategorySpace& categories() const override { return categories_; }
  std::size_t num_layers() const override { return static_cast<std::size_t>(options_.layers); }
  std::size_t token_dim(std::size_t) const override { return static_cast<std::size_t>(options_.dim); }
  std::size_t text_dim() const override { return static_cast<std::size_t>(options_.dim); }
  std::size_t max_text_tokens() const override { return categories_.size(); }
  int input_multiple() const override { return options_.patch; }

  Matrix tokenize(const Image& image) const override;
  Matrix encode_layer(std::size_t layer, const Matrix& tokens, const Matrix& prompt) const override;
  /// All layers; `visual` must hold one prompt block per layer.
  Matrix encode(const Matrix& tokens, std::span<const Matrix> visual) const;
  /// Class embeddings plus the additive text prompt.
  Matrix text_embed(const Matrix& text_prompt) const;

  std::vector<Detection> predict(const Image& image, const PromptSet& prompts) const override;
  LossResult loss_and_grad(const Image& image, std::span<const Target> targets,
                           const PromptSet& prompts) const override;

  /// Patch rectangle of token `k` for an image `grid_w` tokens wide.
  BoundingBox patch_box(std::size_t k, int grid_w) const;
  /// Token whose patch has the highest IoU with `box` (lowest index on
  /// ties), or -1 if it overlaps no patch.
  int assign_token(const BoundingBox& box, int grid_h, int grid_w) const;

 private:
  struct Trace;

  ToyDetector(CategorySpace categories, ToyDetectorOptions options, ToyWeights weights);

  void check_prompts(const PromptSet& prompts) const;
  void check_image(const Image& image) const;
  Trace forward(const Image& image, const PromptSet& prompts) const;
  void fit_heads(std::span<const LabeledImage> source, const HeadFitOptions& fit);

  CategorySpace categories_;
  ToyDetectorOptions options_;
  ToyWeights weights_;
};

}  // namespace ttaforge
