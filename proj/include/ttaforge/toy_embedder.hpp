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

#include "ttaforge/backend.hpp"

namespace ttaforge {

struct ToyEmbedderOptions {
  int dim = 64;
  int resize = 16;
  std::uint64_t seed = 11;
  /// Subtracted from every pixel before projection.
  double pixel_mean = 0.5;
};

/// Crop -> bilinear resize -> centre -> fixed seeded projection -> L2 normalisation.
class ToyEmbedder final : public FeatureEmbedder {
 public:
  explicit ToyEmbedder(ToyEmbedderOptions options = {});

  std::size_t dim() const override { return static_cast<std::size_t>(options_.dim); }
  std::vector<double> embed(const Image& crop) const override;

  const Matrix& projection() const { return projection_; }

 private:
  ToyEmbedderOptions options_;
  Matrix projection_;  // (resize^2 * 3) x dim
};

}  // namespace ttaforge
