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

// Synthetic shape scenes and the on-disk dataset / prediction formats.
//
// Layout of a generated dataset directory:
//   annotations.json   images[], annotations[], categories[] (ids are 1-based)
//   images/NNNNNN.ppm  8-bit binary PPM

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ttaforge/augment.hpp"
#include "ttaforge/evalkit.hpp"
#include "ttaforge/toy_detector.hpp"

namespace ttaforge {

enum class Shape { square = 0, disk = 1, triangle = 2 };

/// square, disk, triangle
CategorySpace shape_categories();

using Color = std::array<double, 3>;
using Palette = std::array<Color, 3>;

Palette source_palette();
Palette target_palette();

/// Target-domain shift: a palette change, optionally followed by a
/// corruption. Names: none, palette, gauss1..5, bright1..5, contrast1..5,
/// shot1..5.
struct TargetShift {
  bool palette = false;
  bool corrupted = false;
  CorruptionKind corruption = CorruptionKind::gaussian_noise;
  int severity = 0;

  /// Throws ConfigError on an unknown name.
  static TargetShift parse(const std::string& name);
  std::string name() const;
};

struct SyntheticSpec {
  std::size_t num_images = 200;
  int size = 64;
  int patch = 8;
  int min_objects = 1;
  int max_objects = 4;
  int min_extent = 14;
  int max_extent = 18;
  double background = 0.5;
  double background_noise = 0.03;
  double color_jitter = 0.04;
  double max_pair_iou = 0.3;
  Palette source_colors = source_palette();
  Palette target_colors = target_palette();
  TargetShift shift;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Image `index` of the stream described by `spec`. Pixels are already
/// quantized to the on-disk precision.
LabeledImage synthesize(const SyntheticSpec& spec, std::size_t index);
std::vector<LabeledImage> synthesize_all(const SyntheticSpec& spec);

/// Clean, unshifted images used to fit the detector heads.
std::vector<LabeledImage> source_training_set(std::size_t num_images, std::uint64_t seed, int size = 64);

struct ImageRecord {
  std::int64_t id = 0;
  std::string file;
  int width = 0;
  int height = 0;
};

struct Dataset {
  std::filesystem::path root;
  CategorySpace categories;
  std::vector<ImageRecord> images;
  /// Category indices are 0-based here.
  std::vector<GroundTruthBox> annotations;

  Image load_image(std::size_t i) const;
  std::vector<Image> load_images() const;
};

/// Writes the dataset for `spec` to `dir`.
void generate(const SyntheticSpec& spec, const std::filesystem::path& dir);

/// Throws FormatError with the offending field on malformed or
/// inconsistent annotation documents.
Dataset load_dataset(const std::filesystem::path& dir);

/// One JSON object per line: {image_id, bbox [x, y, w, h], score, category_id}.
void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> predictions);
/// `num_categories` bounds the accepted category ids (1-based in the file).
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path, std::size_t num_categories);

}  // namespace ttaforge
