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
#include "ttaforge/toy_embedder.hpp"

#include <cmath>

#include "ttaforge/error.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

ToyEmbedder::ToyEmbedder(ToyEmbedderOptions options) : options_(options) {
  if (options_.dim <= 0 || options_.resize <= 0) throw ConfigError("ToyEmbedder: dim and resize must be positive");
  const auto in = static_cast<std::size_t>(options_.resize * options_.resize * Image::kChannels);
  projection_ = Matrix(in, static_cast<std::size_t>(options_.dim));
  Rng rng(mix_seed(options_.seed, 1));
  const double stddev = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : projection_.values()) v = normal(rng, 0.0, stddev);
}

std::vector<double> ToyEmbedder::embed(const Image& crop) const {
  if (crop.empty()) throw DegenerateBox("ToyEmbedder: empty crop");
  const Image small = resize_bilinear(crop, options_.resize, options_.resize);
  const auto px = small.pixels();
  std::vector<double> feat(dim(), 0.0);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = px[i] - options_.pixel_mean;
    if (v == 0.0) continue;
    const auto w = projection_.row(i);
    for (std::size_t j = 0; j < feat.size(); ++j) feat[j] += v * w[j];
  }
  double norm = 0.0;
  for (double v : feat) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) {
    // Crop equal to the centring value: fall back to a fixed unit vector.
    std::fill(feat.begin(), feat.end(), 0.0);
    feat[0] = 1.0;
    return feat;
  }
  for (double& v : feat) v /= norm;
  return feat;
}

}  // namespace ttaforge
