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

#include <cstddef>
#include <vector>

#include "ttaforge/tensor.hpp"

namespace ttaforge {

/// Learnable prompt tensors: an additive text prompt (one row per category)
/// and one block of prompt tokens per encoder layer. Gradients use the same
/// type.
struct PromptSet {
  Matrix text;
  std::vector<Matrix> visual;

  /// Prompt tokens per layer (0 when there are no layers).
  std::size_t prompt_count() const { return visual.empty() ? 0 : visual.front().rows(); }

  /// Text first, then visual layers in order.
  std::size_t num_tensors() const { return 1 + visual.size(); }
  Matrix& tensor(std::size_t i) { return i == 0 ? text : visual[i - 1]; }
  const Matrix& tensor(std::size_t i) const { return i == 0 ? text : visual[i - 1]; }

  bool all_finite() const;
  bool same_shape(const PromptSet& other) const;
  /// Zero-filled set with this set's shapes.
  PromptSet zeros_like() const;
  /// this += other (shapes must match).
  void accumulate(const PromptSet& other);

  friend bool operator==(const PromptSet&, const PromptSet&) = default;
};

}  // namespace ttaforge
