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
#include "ttaforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ttaforge/error.hpp"
#include "ttaforge/tensor.hpp"

namespace ttaforge {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  Matrix out(n, m);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m) throw ShapeError("Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), out.row(r).begin());
    ++r;
  }
  return out;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

bool BoundingBox::valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) && x1 <= x2 && y1 <= y2;
}

Image::Image(int height, int width, double fill) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw ShapeError("Image: non-positive size " + std::to_string(height) + "x" + std::to_string(width));
  }
  pixels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * kChannels, fill);
}

bool Image::in_unit_range() const {
  return std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

void Image::clamp_unit() {
  for (double& v : pixels_) v = std::clamp(v, 0.0, 1.0);
}

Detection Detection::from_scores(const BoundingBox& box, std::vector<double> scores) {
  Detection d;
  d.box = box;
  d.scores = std::move(scores);
  if (!d.scores.empty()) {
    const auto it = std::max_element(d.scores.begin(), d.scores.end());
    d.label = static_cast<int>(it - d.scores.begin());
    d.score = *it;
  }
  return d;
}

CategorySpace::CategorySpace(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("CategorySpace: no categories");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("CategorySpace: empty category name");
    if (!seen.insert(n).second) throw ConfigError("CategorySpace: duplicate category '" + n + "'");
  }
}

int CategorySpace::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

std::string CategorySpace::caption() const {
  std::string out;
  for (const auto& n : names_) {
    if (!out.empty()) out += ' ';
    out += n;
    out += '.';
  }
  return out;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox clamp_box(const BoundingBox& box, int width, int height) {
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  BoundingBox out{std::clamp(box.x1, 0.0, w), std::clamp(box.y1, 0.0, h), std::clamp(box.x2, 0.0, w),
                  std::clamp(box.y2, 0.0, h)};
  if (out.x2 < out.x1) out.x2 = out.x1;
  if (out.y2 < out.y1) out.y2 = out.y1;
  return out;
}

PixelRect pixel_rect(const BoundingBox& box, int width, int height) {
  if (!box.valid()) throw DegenerateBox("pixel_rect: invalid box");
  const BoundingBox c = clamp_box(box, width, height);
  PixelRect r{static_cast<int>(std::floor(c.x1)), static_cast<int>(std::floor(c.y1)),
              static_cast<int>(std::ceil(c.x2)), static_cast<int>(std::ceil(c.y2))};
  if (r.width() < 1 || r.height() < 1) throw DegenerateBox("pixel_rect: box covers no pixel");
  return r;
}

Image crop(const Image& image, const BoundingBox& box) {
  const PixelRect r = pixel_rect(box, image.width(), image.height());
  Image out(r.height(), r.width());
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      for (int c = 0; c < Image::kChannels; ++c) out.at(y, x, c) = image.at(r.y0 + y, r.x0 + x, c);
    }
  }
  return out;
}

Image resize_bilinear(const Image& image, int height, int width) {
  if (image.empty()) throw ShapeError("resize_bilinear: empty image");
  if (height == image.height() && width == image.width()) return image;
  Image out(height, width);
  const double sy = static_cast<double>(image.height()) / height;
  const double sx = static_cast<double>(image.width()) / width;
  const int max_y = image.height() - 1;
  const int max_x = image.width() - 1;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_y));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, max_y);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_x));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, max_x);
      const double wx = fx - x0;
      for (int c = 0; c < Image::kChannels; ++c) {
        const double top = image.at(y0, x0, c) * (1.0 - wx) + image.at(y0, x1, c) * wx;
        const double bottom = image.at(y1, x0, c) * (1.0 - wx) + image.at(y1, x1, c) * wx;
        out.at(y, x, c) = std::clamp(top * (1.0 - wy) + bottom * wy, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace ttaforge
