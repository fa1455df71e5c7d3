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

// Small shared objects for the unit tests.

#include <filesystem>
#include <string>

#include "ttaforge/data.hpp"
#include "ttaforge/rng.hpp"
#include "ttaforge/toy_detector.hpp"
#include "ttaforge/toy_embedder.hpp"

namespace ttaforge::testing {

/// 16-dim detector with heads fitted on 40 clean source images.
inline const ToyDetector& small_detector() {
  static const ToyDetector det = [] {
    ToyDetectorOptions o;
    o.dim = 16;
    const auto src = source_training_set(40, 99);
    return ToyDetector::pretrained(shape_categories(), o, src);
  }();
  return det;
}

inline const ToyEmbedder& embedder() {
  static const ToyEmbedder emb;
  return emb;
}

inline Image random_image(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  Image img(h, w);
  for (double& v : img.pixels()) v = uniform_real(rng, 0.0, 1.0);
  return img;
}

inline PromptSet random_prompts(const DetectorBackend& det, std::size_t m, double stddev, std::uint64_t seed) {
  Rng rng(seed);
  PromptSet p = det.zero_prompts(m);
  for (std::size_t t = 0; t < p.num_tensors(); ++t)
    for (double& v : p.tensor(t).values()) v = normal(rng, 0.0, stddev);
  return p;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ttaforge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ttaforge::testing
