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
#include "ttaforge/halluc.hpp"

#include <algorithm>
#include <cmath>

#include "ttaforge/error.hpp"
#include "ttaforge/image_io.hpp"

namespace ttaforge {

void HallucinationConfig::validate() const {
  if (max_instances < 1) throw ConfigError("halluc: max_instances must be >= 1");
  if (!(th_iou >= 0.0 && th_iou <= 1.0)) throw ConfigError("halluc: th_iou must be in [0, 1]");
  if (max_retries < 1) throw ConfigError("halluc: max_retries must be >= 1");
  if (!(beta_a > 0.0 && beta_b > 0.0)) throw ConfigError("halluc: Beta parameters must be positive");
  if (!(scale_lo > 0.0 && scale_hi >= scale_lo)) throw ConfigError("halluc: need 0 < scale_lo <= scale_hi");
}

Image blend(const Image& region, const Image& instance, double lambda) {
  if (region.height() != instance.height() || region.width() != instance.width()) {
    throw ShapeError("blend: region and instance sizes differ");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("blend: lambda must be in [0, 1]");
  Image out = region;
  auto dst = out.pixels();
  const auto src = instance.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(lambda * src[i] + (1.0 - lambda) * dst[i], 0.0, 1.0);
  return out;
}

Hallucination hallucinate(const Image& negative, const InstanceMemory& memory, const HallucinationConfig& config,
                          Rng& rng) {
  config.validate();
  Hallucination h;
  h.image = negative;
  if (memory.empty()) {
    h.no_memory = true;
    return h;
  }
  const int count = uniform_int(rng, 1, config.max_instances);
  const auto instances = memory.sample(static_cast<std::size_t>(count), rng);
  std::vector<BoundingBox> placed;
  for (const auto& inst : instances) {
    const double scale = uniform_real(rng, config.scale_lo, config.scale_hi);
    const int w = std::clamp(static_cast<int>(std::lround(inst.crop.width() * scale)), 1, negative.width());
    const int ht = std::clamp(static_cast<int>(std::lround(inst.crop.height() * scale)), 1, negative.height());
    const double lambda =
        config.fixed_lambda ? std::clamp(*config.fixed_lambda, 0.0, 1.0) : beta_sample(rng, config.beta_a, config.beta_b);

    bool ok = false;
    BoundingBox box;
    for (int attempt = 0; attempt <= config.max_retries && !ok; ++attempt) {
      const int x = uniform_int(rng, 0, negative.width() - w);
      const int y = uniform_int(rng, 0, negative.height() - ht);
      box = BoundingBox{static_cast<double>(x), static_cast<double>(y), static_cast<double>(x + w),
                        static_cast<double>(y + ht)};
      ok = std::none_of(placed.begin(), placed.end(), [&](const BoundingBox& b) { return iou(b, box) > config.th_iou; });
    }
    if (!ok) {
      ++h.dropped;
      continue;
    }
    const Image scaled = resize_bilinear(inst.crop, ht, w);
    const auto x0 = static_cast<int>(box.x1);
    const auto y0 = static_cast<int>(box.y1);
    for (int yy = 0; yy < ht; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        for (int c = 0; c < Image::kChannels; ++c) {
          double& dst = h.image.at(y0 + yy, x0 + xx, c);
          dst = std::clamp(lambda * scaled.at(yy, xx, c) + (1.0 - lambda) * dst, 0.0, 1.0);
        }
      }
    }
    placed.push_back(box);
    h.labels.push_back({box, inst.category, inst.score});
    h.lambdas.push_back(lambda);
  }
  return h;
}

void dump_hallucination(const std::filesystem::path& path, const Hallucination& h) {
  Image canvas = h.image;
  for (const auto& label : h.labels) {
    const PixelRect r = pixel_rect(label.box, canvas.width(), canvas.height());
    auto paint = [&](int y, int x) {
      canvas.at(y, x, 0) = 1.0;
      canvas.at(y, x, 1) = 1.0;
      canvas.at(y, x, 2) = 0.0;
    };
    for (int x = r.x0; x < r.x1; ++x) {
      paint(r.y0, x);
      paint(r.y1 - 1, x);
    }
    for (int y = r.y0; y < r.y1; ++y) {
      paint(y, r.x0);
      paint(y, r.x1 - 1);
    }
  }
  write_ppm(path, canvas);
}

}  // namespace ttaforge
