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
#include <filesystem>
#include <vector>

#include "ttaforge/backend.hpp"
#include "ttaforge/prompt_set.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge {

/// Zero text prompt, so the modulated text embeddings start equal to the
/// raw class embeddings.
Matrix init_text(const CategorySpace& categories, std::size_t text_dim);

/// What the warm start pooled from the first image.
struct WarmStartRecord {
  std::int64_t source_image = -1;
  /// Mean input token of each encoder layer, before noise.
  std::vector<std::vector<double>> pooled;
};

struct WarmStart {
  std::vector<Matrix> visual;
  WarmStartRecord record;
};

/// Initialises `m` prompt tokens per layer to the mean of that layer's
/// input image tokens on `first_image`, plus N(0, noise_stddev) noise per
/// entry to break the symmetry between rows. Layers are filled in order:
/// layer i's input is computed with the already-initialised prompts of
/// layers < i.
WarmStart warm_start_visual(const Image& first_image, const DetectorBackend& backend, std::size_t m,
                            double noise_stddev, Rng& rng, std::int64_t source_image = 0);

/// teacher <- gamma * teacher + (1 - gamma) * student, on every entry.
void ema_update(PromptSet& teacher, const PromptSet& student, double gamma);

/// Prompt checkpoint in the shared tensor container ("PT", "PI0".."PIn").
void save_prompts(const std::filesystem::path& path, const PromptSet& prompts, std::uint64_t seed);
PromptSet load_prompts(const std::filesystem::path& path);

}  // namespace ttaforge
