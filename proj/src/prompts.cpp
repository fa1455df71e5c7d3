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
#include "ttaforge/prompts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttaforge/container.hpp"
#include "ttaforge/error.hpp"

namespace ttaforge {

bool PromptSet::all_finite() const {
  if (!text.all_finite()) return false;
  return std::all_of(visual.begin(), visual.end(), [](const Matrix& m) { return m.all_finite(); });
}

bool PromptSet::same_shape(const PromptSet& other) const {
  if (!text.same_shape(other.text) || visual.size() != other.visual.size()) return false;
  for (std::size_t i = 0; i < visual.size(); ++i) {
    if (!visual[i].same_shape(other.visual[i])) return false;
  }
  return true;
}

PromptSet PromptSet::zeros_like() const {
  PromptSet out;
  out.text = Matrix(text.rows(), text.cols());
  for (const auto& v : visual) out.visual.emplace_back(v.rows(), v.cols());
  return out;
}

void PromptSet::accumulate(const PromptSet& other) {
  if (!same_shape(other)) throw ShapeError("PromptSet::accumulate: shape mismatch");
  for (std::size_t t = 0; t < num_tensors(); ++t) {
    auto dst = tensor(t).values();
    const auto src = other.tensor(t).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

PromptSet DetectorBackend::zero_prompts(std::size_t m) const {
  PromptSet p;
  p.text = init_text(categories(), text_dim());
  for (std::size_t l = 0; l < num_layers(); ++l) p.visual.emplace_back(m, token_dim(l));
  return p;
}

Matrix init_text(const CategorySpace& categories, std::size_t text_dim) { return Matrix(categories.size(), text_dim); }

WarmStart warm_start_visual(const Image& first_image, const DetectorBackend& backend, std::size_t m,
                            double noise_stddev, Rng& rng, std::int64_t source_image) {
  WarmStart out;
  out.record.source_image = source_image;
  Matrix tokens = backend.tokenize(first_image);
  for (std::size_t l = 0; l < backend.num_layers(); ++l) {
    if (tokens.cols() != backend.token_dim(l)) throw ShapeError("warm_start_visual: token dimension mismatch");
    std::vector<double> mean(tokens.cols(), 0.0);
    for (std::size_t r = 0; r < tokens.rows(); ++r) {
      for (std::size_t c = 0; c < tokens.cols(); ++c) mean[c] += tokens(r, c);
    }
    for (double& v : mean) v /= static_cast<double>(tokens.rows());
    Matrix prompt(m, tokens.cols());
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < tokens.cols(); ++c) {
        prompt(r, c) = mean[c] + (noise_stddev > 0.0 ? normal(rng, 0.0, noise_stddev) : 0.0);
      }
    }
    out.record.pooled.push_back(mean);
    tokens = backend.encode_layer(l, tokens, prompt);
    out.visual.push_back(std::move(prompt));
  }
  return out;
}

void ema_update(PromptSet& teacher, const PromptSet& student, double gamma) {
  if (!teacher.same_shape(student)) throw ShapeError("ema_update: teacher and student shapes differ");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("ema_update: momentum must be in [0, 1]");
  for (std::size_t t = 0; t < teacher.num_tensors(); ++t) {
    auto dst = teacher.tensor(t).values();
    const auto src = student.tensor(t).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = gamma * dst[i] + (1.0 - gamma) * src[i];
  }
}

void save_prompts(const std::filesystem::path& path, const PromptSet& prompts, std::uint64_t seed) {
  TensorContainer c;
  c.seed = seed;
  c.sections.push_back({"PT", prompts.text});
  for (std::size_t i = 0; i < prompts.visual.size(); ++i) c.sections.push_back({"PI" + std::to_string(i), prompts.visual[i]});
  write_container(path, c);
}

PromptSet load_prompts(const std::filesystem::path& path) {
  const TensorContainer c = read_container(path);
  PromptSet p;
  p.text = c.at("PT");
  for (std::size_t i = 0;; ++i) {
    const std::string tag = "PI" + std::to_string(i);
    const bool present = std::any_of(c.sections.begin(), c.sections.end(), [&](const auto& s) { return s.tag == tag; });
    if (!present) break;
    p.visual.push_back(c.at(tag));
  }
  return p;
}

}  // namespace ttaforge
