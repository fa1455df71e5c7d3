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

// Teacher (weak) and student (strong) views of a test image, and the seeded
// corruptions used to build shifted target streams.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttaforge/core.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

/// Axis-aligned rescale from an input geometry to an output geometry.
struct GeometricTransform {
  int in_width = 0;
  int in_height = 0;
  int out_width = 0;
  int out_height = 0;

  double scale_x() const { return static_cast<double>(out_width) / in_width; }
  double scale_y() const { return static_cast<double>(out_height) / in_height; }
  BoundingBox apply(const BoundingBox& box) const;
  BoundingBox invert(const BoundingBox& box) const;
};

enum class ColorOp { brightness, contrast, solarize, posterize };

struct AugmentationSpec {
  std::vector<int> resize_scales{64, 80, 96};
  /// Strong view draws exactly one op from this pool; empty means none.
  std::vector<ColorOp> color_ops{ColorOp::brightness, ColorOp::contrast, ColorOp::solarize, ColorOp::posterize};
  int max_erase = 4;
  double erase_max_fraction = 0.2;
  double erase_fill = 0.5;

  /// Every resize target must be a positive multiple of `multiple`.
  void validate(int multiple) const;

  friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

struct Augmented {
  Image image;
  GeometricTransform transform;
};

/// Random square resize to one of the configured sizes; nothing else.
Augmented weak(const Image& image, const AugmentationSpec& spec, Rng& rng);

struct ColorOpParams {
  ColorOp op = ColorOp::brightness;
  /// Factor for brightness/contrast, threshold for solarize, bits for posterize.
  double value = 1.0;
};

struct EraseRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Every random choice of one strong augmentation, so it can be replayed.
struct StrongPlan {
  int size = 64;
  ColorOpParams color;
  std::vector<EraseRect> erase;
};

StrongPlan sample_strong_plan(const AugmentationSpec& spec, Rng& rng);
Image apply_color_op(const Image& image, const ColorOpParams& params);
void rand_erase(Image& image, std::span<const EraseRect> rects, double fill);
Augmented apply_strong(const Image& image, const StrongPlan& plan, const AugmentationSpec& spec);

/// Random resize, one colour op from the pool, then 0..max_erase erased
/// rectangles.
Augmented strong(const Image& image, const AugmentationSpec& spec, Rng& rng);

enum class CorruptionKind { gaussian_noise, shot_noise, brightness, contrast };

class CorruptionSpec {
 public:
  /// Throws ConfigError unless 1 <= severity <= 5.
  CorruptionSpec(CorruptionKind kind, int severity, std::uint64_t seed);

  CorruptionKind kind() const { return kind_; }
  int severity() const { return severity_; }
  std::uint64_t seed() const { return seed_; }

 private:
  CorruptionKind kind_;
  int severity_;
  std::uint64_t seed_;
};

/// Deterministic given the spec's seed. Output stays in [0, 1].
Image corrupt(const Image& image, const CorruptionSpec& spec);

/// Per-severity constant of a corruption (noise sigma, Poisson rate, shift or factor).
double corruption_level(CorruptionKind kind, int severity);

std::string to_string(CorruptionKind kind);
std::string to_string(ColorOp op);
/// Throws ConfigError on an unknown name.
ColorOp parse_color_op(const std::string& name);

}  // namespace ttaforge
