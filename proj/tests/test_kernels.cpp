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
#include <gtest/gtest.h>

#include <vector>

#include "ttaforge/error.hpp"
#include "ttaforge/kernels.hpp"
#include "ttaforge/rng.hpp"

namespace ttaforge::kernels {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng, 0.0, 1.0);
  return m;
}

// Triple loop with a fixed k order: the reference both kernels must match.
Matrix naive(const Matrix& a, const Matrix& b, bool ta, bool tb) {
  const std::size_t n = ta ? a.cols() : a.rows();
  const std::size_t k = ta ? a.rows() : a.cols();
  const std::size_t p = tb ? b.rows() : b.cols();
  Matrix out(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += (ta ? a(t, i) : a(i, t)) * (tb ? b(j, t) : b(t, j));
      out(i, j) = s;
    }
  return out;
}

class KernelShapes : public ::testing::TestWithParam<std::pair<std::size_t, std::size_t>> {};

TEST_P(KernelShapes, SerialAndParallelAreBitIdentical) {
  const auto [n, d] = GetParam();
  const Matrix x = random_matrix(n, d, 1);
  const Matrix w = random_matrix(d, d, 2);
  const Matrix y = random_matrix(n, d, 3);
  std::vector<double> bias(d);
  for (std::size_t i = 0; i < d; ++i) bias[i] = 0.01 * static_cast<double>(i);

  Matrix s, p;
  serial::affine(x, w, bias, s);
  parallel::affine(x, w, bias, p);
  EXPECT_EQ(s, p);

  serial::matmul_nt(x, y, s);
  parallel::matmul_nt(x, y, p);
  EXPECT_EQ(s, p);

  serial::matmul_tn(x, y, s);
  parallel::matmul_tn(x, y, p);
  EXPECT_EQ(s, p);

  EXPECT_EQ(serial::column_sum(x), parallel::column_sum(x));
}

TEST_P(KernelShapes, MatchNaiveReference) {
  const auto [n, d] = GetParam();
  const Matrix a = random_matrix(n, d, 4);
  const Matrix b = random_matrix(n, d, 5);
  const Matrix w = random_matrix(d, d, 6);
  Matrix out;
  for (auto exec : {Execution::serial, Execution::parallel}) {
    matmul_nt(exec, a, b, out);
    const Matrix ref_nt = naive(a, b, false, true);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.values()[i], ref_nt.values()[i], 1e-12);
    matmul_tn(exec, a, b, out);
    const Matrix ref_tn = naive(a, b, true, false);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.values()[i], ref_tn.values()[i], 1e-12);
    affine(exec, a, w, {}, out);
    const Matrix ref_aff = naive(a, w, false, false);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.values()[i], ref_aff.values()[i], 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelShapes,
                         ::testing::Values(std::pair<std::size_t, std::size_t>{1, 1}, std::pair<std::size_t, std::size_t>{7, 3},
                                           std::pair<std::size_t, std::size_t>{64, 32},
                                           std::pair<std::size_t, std::size_t>{150, 17}));

TEST(Kernels, ShapeMismatchThrows) {
  Matrix out;
  EXPECT_THROW(serial::matmul_nt(Matrix(2, 3), Matrix(2, 4), out), ShapeError);
  EXPECT_THROW(parallel::affine(Matrix(2, 3), Matrix(4, 4), {}, out), ShapeError);
}

}  // namespace
}  // namespace ttaforge::kernels
