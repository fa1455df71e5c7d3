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

#include <span>
#include <string>
#include <vector>

namespace ttaforge {

/// Axis-aligned box in corner form, float pixel coordinates.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  static BoundingBox from_xywh(double x, double y, double w, double h) { return {x, y, x + w, y + h}; }
  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  }

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  /// Ordered corners and finite coordinates.
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// H x W x 3 image with values in [0, 1], stored interleaved row-major.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return pixels_.empty(); }

  double& at(int y, int x, int c) { return pixels_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return pixels_[index(y, x, c)]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool in_unit_range() const;
  void clamp_unit();

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * kChannels +
           static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// A predicted box with its full per-category score vector.
struct Detection {
  BoundingBox box;
  std::vector<double> scores;
  int label = 0;
  double score = 0.0;

  /// Builds a detection whose label is the first argmax of `scores`.
  static Detection from_scores(const BoundingBox& box, std::vector<double> scores);
};

/// A supervision target for the student: box, category index and loss weight.
struct Target {
  BoundingBox box;
  int category = 0;
  double weight = 1.0;

  friend bool operator==(const Target&, const Target&) = default;
};

class CategorySpace {
 public:
  CategorySpace() = default;
  explicit CategorySpace(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  /// Index of `name`, or -1.
  int index_of(const std::string& name) const;
  /// Dot-joined caption, e.g. "square. disk. triangle."
  std::string caption() const;

 private:
  std::vector<std::string> names_;
};

double iou(const BoundingBox& a, const BoundingBox& b);

BoundingBox clamp_box(const BoundingBox& box, int width, int height);
inline BoundingBox clamp_box(const BoundingBox& box, const Image& image) {
  return clamp_box(box, image.width(), image.height());
}

/// Pixel rectangle [x0, x1) x [y0, y1) covered by a clamped box, rounded
/// outward (floor on the low corner, ceil on the high corner).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

/// Throws DegenerateBox when the rounded clamped extent is below one pixel.
PixelRect pixel_rect(const BoundingBox& box, int width, int height);

Image crop(const Image& image, const BoundingBox& box);

/// Bilinear resize with half-pixel centers. Same-size resize is an exact copy.
Image resize_bilinear(const Image& image, int height, int width);

}  // namespace ttaforge
