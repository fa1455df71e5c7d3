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
#include "ttaforge/optimizer.hpp"

#include <cmath>

#include "ttaforge/error.hpp"

namespace ttaforge {

AdamW::AdamW(const PromptSet& shape, AdamWOptions options)
    : options_(options), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void AdamW::step(PromptSet& params, const PromptSet& grad, double lr_text, double lr_visual) {
  if (!params.same_shape(m_) || !grad.same_shape(m_)) throw ShapeError("AdamW: parameter/gradient shape mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.num_tensors(); ++k) {
    const double lr = k == 0 ? lr_text : lr_visual;
    auto p = params.tensor(k).values();
    const auto g = grad.tensor(k).values();
    auto m = m_.tensor(k).values();
    auto v = v_.tensor(k).values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= lr * options_.weight_decay * p[i];
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.eps);
    }
  }
}

}  // namespace ttaforge
