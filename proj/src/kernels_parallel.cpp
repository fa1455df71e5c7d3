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
#include <cstdint>

#include "kernels_impl.hpp"
#include "ttaforge/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ttaforge::kernels {

namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 1U << 14;

}  // namespace

namespace parallel {

void affine(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  detail::check_affine(x, w, bias);
  out = Matrix(x.rows(), w.cols());
  const auto rows = static_cast<std::int64_t>(x.rows());
  const bool big = x.rows() * x.cols() * w.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t r = 0; r < rows; ++r) detail::affine_row(x, w, bias, static_cast<std::size_t>(r), out);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  detail::check_nt(a, b);
  out = Matrix(a.rows(), b.rows());
  const auto rows = static_cast<std::int64_t>(a.rows());
  const bool big = a.rows() * a.cols() * b.rows() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t r = 0; r < rows; ++r) detail::nt_row(a, b, static_cast<std::size_t>(r), out);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  detail::check_tn(a, b);
  out = Matrix(a.cols(), b.cols());
  const auto rows = static_cast<std::int64_t>(a.cols());
  const bool big = a.rows() * a.cols() * b.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t i = 0; i < rows; ++i) detail::tn_row(a, b, static_cast<std::size_t>(i), out);
}

std::vector<double> column_sum(const Matrix& x) {
  std::vector<double> sums(x.cols(), 0.0);
  const auto cols = static_cast<std::int64_t>(x.cols());
  const bool big = x.size() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t c = 0; c < cols; ++c) sums[c] = detail::column_total(x, static_cast<std::size_t>(c));
  return sums;
}

}  // namespace parallel

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ttaforge::kernels
