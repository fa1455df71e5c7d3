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
#include <vector>

#include "ttaforge/backend.hpp"
#include "ttaforge/idm.hpp"

namespace ttaforge {

struct AffinityParams {
  double alpha = 5.0;  ///< weighting factor
  double beta = 5.0;   ///< sharpness ratio
  double th_me = 0.3;  ///< only detections scoring above this are enhanced
};

/// alpha * exp(-beta * (1 - x))
double affinity(double x, const AffinityParams& params);

/// Adds, for every category with a prototype, the affinity between the
/// detection's crop feature and that prototype to the category's score,
/// then re-takes the argmax. Detections at or below th_me, and those whose
/// crop is degenerate, pass through unchanged. Output order = input order.
/// Enhanced scores are not clamped.
std::vector<Detection> enhance(const Image& image, std::span<const Detection> detections, const Prototypes& prototypes,
                               const FeatureEmbedder& embedder, const AffinityParams& params);

}  // namespace ttaforge
