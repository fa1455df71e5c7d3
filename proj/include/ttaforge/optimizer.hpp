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
#include <vector>

#include "ttaforge/prompt_set.hpp"

namespace ttaforge {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

/// AdamW over a PromptSet with one learning rate for the text prompt and
/// another for every visual prompt block.
///
///   p <- p - lr * wd * p
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
class AdamW {
 public:
  AdamW() = default;
  AdamW(const PromptSet& shape, AdamWOptions options);

  void step(PromptSet& params, const PromptSet& grad, double lr_text, double lr_visual);

  std::int64_t steps() const { return t_; }
  const PromptSet& first_moment() const { return m_; }
  const PromptSet& second_moment() const { return v_; }
  const AdamWOptions& options() const { return options_; }

 private:
  AdamWOptions options_;
  PromptSet m_;
  PromptSet v_;
  std::int64_t t_ = 0;
};

}  // namespace ttaforge
