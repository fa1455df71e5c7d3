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
#include "ttaforge/enhance.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>

#include "ttaforge/error.hpp"

namespace ttaforge {

double affinity(double x, const AffinityParams& params) { return params.alpha * std::exp(-params.beta * (1.0 - x)); }

std::vector<Detection> enhance(const Image& image, std::span<const Detection> detections, const Prototypes& prototypes,
                               const FeatureEmbedder& embedder, const AffinityParams& params) {
  std::vector<Detection> out(detections.begin(), detections.end());
  if (prototypes.empty()) return out;
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const Detection& det = detections[static_cast<std::size_t>(i)];
    if (!(det.score > params.th_me)) continue;
    Image patch;
    try {
      patch = crop(image, det.box);
    } catch (const DegenerateBox&) {
      continue;
    }
    const auto feat = embedder.embed(patch);
    std::vector<double> scores = det.scores;
    for (const auto& [category, proto] : prototypes) {
      if (category < 0 || static_cast<std::size_t>(category) >= scores.size()) continue;
      const double sim = std::inner_product(feat.begin(), feat.end(), proto.begin(), 0.0);
      scores[static_cast<std::size_t>(category)] += affinity(sim, params);
    }
    out[static_cast<std::size_t>(i)] = Detection::from_scores(det.box, std::move(scores));
  }
  return out;
}

}  // namespace ttaforge
