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
#include <string>

#include "kernels_impl.hpp"
#include "ttaforge/error.hpp"
#include "ttaforge/kernels.hpp"

namespace ttaforge::kernels {

namespace detail {

void check_affine(const Matrix& x, const Matrix& w, std::span<const double> bias) {
  if (x.cols() != w.rows()) {
    throw ShapeError("affine: inner dimension " + std::to_string(x.cols()) + " vs " + std::to_string(w.rows()));
  }
  if (!bias.empty() && bias.size() != w.cols()) throw ShapeError("affine: bias length mismatch");
}

void check_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dimension mismatch");
}

void check_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: inner dimension mismatch");
}

}  // namespace detail

namespace serial {

void affine(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  detail::check_affine(x, w, bias);
  out = Matrix(x.rows(), w.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) detail::affine_row(x, w, bias, r, out);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  detail::check_nt(a, b);
  out = Matrix(a.rows(), b.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) detail::nt_row(a, b, r, out);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  detail::check_tn(a, b);
  out = Matrix(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) detail::tn_row(a, b, i, out);
}

std::vector<double> column_sum(const Matrix& x) {
  std::vector<double> sums(x.cols(), 0.0);
  for (std::size_t c = 0; c < x.cols(); ++c) sums[c] = detail::column_total(x, c);
  return sums;
}

}  // namespace serial

void affine(Execution exec, const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  exec == Execution::parallel ? parallel::affine(x, w, bias, out) : serial::affine(x, w, bias, out);
}

void matmul_nt(Execution exec, const Matrix& a, const Matrix& b, Matrix& out) {
  exec == Execution::parallel ? parallel::matmul_nt(a, b, out) : serial::matmul_nt(a, b, out);
}

void matmul_tn(Execution exec, const Matrix& a, const Matrix& b, Matrix& out) {
  exec == Execution::parallel ? parallel::matmul_tn(a, b, out) : serial::matmul_tn(a, b, out);
}

std::vector<double> column_sum(Execution exec, const Matrix& x) {
  return exec == Execution::parallel ? parallel::column_sum(x) : serial::column_sum(x);
}

}  // namespace ttaforge::kernels
