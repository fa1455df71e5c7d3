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
#include "ttaforge/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ttaforge/error.hpp"

namespace ttaforge {

namespace {

constexpr std::array<double, 5> kGaussianSigma{0.04, 0.06, 0.08, 0.09, 0.10};
constexpr std::array<double, 5> kShotRate{60.0, 25.0, 12.0, 5.0, 3.0};
constexpr std::array<double, 5> kBrightnessShift{0.1, 0.2, 0.3, 0.4, 0.5};
constexpr std::array<double, 5> kContrastFactor{0.75, 0.6, 0.45, 0.3, 0.15};

double pixel_mean(const Image& image) {
  const auto px = image.pixels();
  return std::accumulate(px.begin(), px.end(), 0.0) / static_cast<double>(px.size());
}

}  // namespace

BoundingBox GeometricTransform::apply(const BoundingBox& box) const {
  return {box.x1 * scale_x(), box.y1 * scale_y(), box.x2 * scale_x(), box.y2 * scale_y()};
}

BoundingBox GeometricTransform::invert(const BoundingBox& box) const {
  return {box.x1 / scale_x(), box.y1 / scale_y(), box.x2 / scale_x(), box.y2 / scale_y()};
}

void AugmentationSpec::validate(int multiple) const {
  if (resize_scales.empty()) throw ConfigError("augment: resize_scales is empty");
  for (int s : resize_scales) {
    if (s <= 0 || multiple <= 0 || s % multiple != 0) {
      throw ConfigError("augment: resize target " + std::to_string(s) + " is not a positive multiple of " +
                        std::to_string(multiple));
    }
  }
  if (max_erase < 0) throw ConfigError("augment: max_erase must be >= 0");
  if (!(erase_max_fraction > 0.0 && erase_max_fraction <= 1.0)) throw ConfigError("augment: erase fraction in (0, 1]");
}

Augmented weak(const Image& image, const AugmentationSpec& spec, Rng& rng) {
  const int size = spec.resize_scales[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<int>(spec.resize_scales.size()) - 1))];
  Augmented out;
  out.image = resize_bilinear(image, size, size);
  out.transform = {image.width(), image.height(), size, size};
  return out;
}

StrongPlan sample_strong_plan(const AugmentationSpec& spec, Rng& rng) {
  StrongPlan plan;
  plan.size = spec.resize_scales[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<int>(spec.resize_scales.size()) - 1))];
  if (spec.color_ops.empty()) {
    plan.color = {ColorOp::brightness, 1.0};
  } else {
    const auto op = spec.color_ops[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(spec.color_ops.size()) - 1))];
    switch (op) {
      case ColorOp::brightness:
        plan.color = {op, uniform_real(rng, 0.5, 1.5)};
        break;
      case ColorOp::contrast:
        plan.color = {op, uniform_real(rng, 0.5, 1.5)};
        break;
      case ColorOp::solarize:
        plan.color = {op, uniform_real(rng, 0.5, 1.0)};
        break;
      case ColorOp::posterize:
        plan.color = {op, static_cast<double>(uniform_int(rng, 3, 7))};
        break;
    }
  }
  const int count = uniform_int(rng, 0, spec.max_erase);
  const int max_w = std::max(1, static_cast<int>(spec.erase_max_fraction * plan.size));
  const int max_h = max_w;
  for (int i = 0; i < count; ++i) {
    EraseRect r;
    r.width = uniform_int(rng, 1, max_w);
    r.height = uniform_int(rng, 1, max_h);
    r.x = uniform_int(rng, 0, plan.size - r.width);
    r.y = uniform_int(rng, 0, plan.size - r.height);
    plan.erase.push_back(r);
  }
  return plan;
}

Image apply_color_op(const Image& image, const ColorOpParams& params) {
  Image out = image;
  auto px = out.pixels();
  switch (params.op) {
    case ColorOp::brightness:
      for (double& v : px) v = std::clamp(v * params.value, 0.0, 1.0);
      break;
    case ColorOp::contrast: {
      const double mean = pixel_mean(image);
      for (double& v : px) v = std::clamp((v - mean) * params.value + mean, 0.0, 1.0);
      break;
    }
    case ColorOp::solarize:
      for (double& v : px) {
        if (v > params.value) v = 1.0 - v;
      }
      break;
    case ColorOp::posterize: {
      const int bits = std::clamp(static_cast<int>(params.value), 1, 8);
      const int mask = ~((1 << (8 - bits)) - 1) & 0xFF;
      for (double& v : px) v = (static_cast<int>(std::lround(v * 255.0)) & mask) / 255.0;
      break;
    }
  }
  return out;
}

void rand_erase(Image& image, std::span<const EraseRect> rects, double fill) {
  for (const auto& r : rects) {
    const int x1 = std::min(image.width(), r.x + r.width);
    const int y1 = std::min(image.height(), r.y + r.height);
    for (int y = std::max(0, r.y); y < y1; ++y) {
      for (int x = std::max(0, r.x); x < x1; ++x) {
        for (int c = 0; c < Image::kChannels; ++c) image.at(y, x, c) = fill;
      }
    }
  }
}

Augmented apply_strong(const Image& image, const StrongPlan& plan, const AugmentationSpec& spec) {
  Augmented out;
  out.image = apply_color_op(resize_bilinear(image, plan.size, plan.size), plan.color);
  rand_erase(out.image, plan.erase, spec.erase_fill);
  out.transform = {image.width(), image.height(), plan.size, plan.size};
  return out;
}

Augmented strong(const Image& image, const AugmentationSpec& spec, Rng& rng) {
  return apply_strong(image, sample_strong_plan(spec, rng), spec);
}

CorruptionSpec::CorruptionSpec(CorruptionKind kind, int severity, std::uint64_t seed)
    : kind_(kind), severity_(severity), seed_(seed) {
  if (severity < 1 || severity > 5) throw ConfigError("corruption severity must be in 1..5, got " + std::to_string(severity));
}

double corruption_level(CorruptionKind kind, int severity) {
  const auto i = static_cast<std::size_t>(std::clamp(severity, 1, 5) - 1);
  switch (kind) {
    case CorruptionKind::gaussian_noise:
      return kGaussianSigma[i];
    case CorruptionKind::shot_noise:
      return kShotRate[i];
    case CorruptionKind::brightness:
      return kBrightnessShift[i];
    case CorruptionKind::contrast:
      return kContrastFactor[i];
  }
  return 0.0;
}

Image corrupt(const Image& image, const CorruptionSpec& spec) {
  Image out = image;
  auto px = out.pixels();
  const double level = corruption_level(spec.kind(), spec.severity());
  Rng rng(mix_seed(spec.seed(), 0xC0AA));
  switch (spec.kind()) {
    case CorruptionKind::gaussian_noise: {
      std::normal_distribution<double> noise(0.0, level);
      for (double& v : px) v = std::clamp(v + noise(rng), 0.0, 1.0);
      break;
    }
    case CorruptionKind::shot_noise:
      for (double& v : px) {
        std::poisson_distribution<int> shot(std::max(v, 0.0) * level);
        v = std::clamp(shot(rng) / level, 0.0, 1.0);
      }
      break;
    case CorruptionKind::brightness:
      for (double& v : px) v = std::clamp(v + level, 0.0, 1.0);
      break;
    case CorruptionKind::contrast: {
      const double mean = pixel_mean(image);
      for (double& v : px) v = std::clamp((v - mean) * level + mean, 0.0, 1.0);
      break;
    }
  }
  return out;
}

std::string to_string(ColorOp op) {
  switch (op) {
    case ColorOp::brightness:
      return "brightness";
    case ColorOp::contrast:
      return "contrast";
    case ColorOp::solarize:
      return "solarize";
    case ColorOp::posterize:
      return "posterize";
  }
  return "unknown";
}

ColorOp parse_color_op(const std::string& name) {
  for (auto op : {ColorOp::brightness, ColorOp::contrast, ColorOp::solarize, ColorOp::posterize}) {
    if (to_string(op) == name) return op;
  }
  throw ConfigError("unknown colour op '" + name + "'");
}

std::string to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::gaussian_noise:
      return "gaussian_noise";
    case CorruptionKind::shot_noise:
      return "shot_noise";
    case CorruptionKind::brightness:
      return "brightness";
    case CorruptionKind::contrast:
      return "contrast";
  }
  return "unknown";
}

}  // namespace ttaforge
