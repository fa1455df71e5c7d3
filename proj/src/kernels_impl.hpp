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

// Per-row bodies shared by the serial and OpenMP kernels. Keeping one body
// per output row is what makes the two paths bit-identical.

#include <span>

#include "ttaforge/tensor.hpp"

namespace ttaforge::kernels::detail {

void check_affine(const Matrix& x, const Matrix& w, std::span<const double> bias);
void check_nt(const Matrix& a, const Matrix& b);
void check_tn(const Matrix& a, const Matrix& b);

inline void affine_row(const Matrix& x, const Matrix& w, std::span<const double> bias, std::size_t r, Matrix& out) {
  auto dst = out.row(r);
  if (bias.empty()) {
    for (double& v : dst) v = 0.0;
  } else {
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = bias[j];
  }
  const auto src = x.row(r);
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double a = src[k];
    if (a == 0.0) continue;
    const auto wk = w.row(k);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += a * wk[j];
  }
}

inline void nt_row(const Matrix& a, const Matrix& b, std::size_t r, Matrix& out) {
  const auto ar = a.row(r);
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const auto br = b.row(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < ar.size(); ++k) acc += ar[k] * br[k];
    out(r, j) = acc;
  }
}

inline void tn_row(const Matrix& a, const Matrix& b, std::size_t i, Matrix& out) {
  auto dst = out.row(i);
  for (double& v : dst) v = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double coef = a(r, i);
    if (coef == 0.0) continue;
    const auto br = b.row(r);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += coef * br[j];
  }
}

inline double column_total(const Matrix& x, std::size_t c) {
  double acc = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) acc += x(r, c);
  return acc;
}

}  // namespace ttaforge::kernels::detail
