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

// Dense kernels behind the toy detector. Two implementations share one
// contract: `serial` is the reference, `parallel` splits output rows across
// OpenMP threads. Every output element is accumulated in the same order in
// both, so results are bit-identical and tests compare them with ==.

#include <span>
#include <vector>

#include "ttaforge/tensor.hpp"

namespace ttaforge::kernels {

enum class Execution { serial, parallel };

namespace serial {

/// out = x * w + bias (bias broadcast over rows; empty bias means zero).
void affine(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
/// out = a * b^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
/// out = a^T * b
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
std::vector<double> column_sum(const Matrix& x);

}  // namespace serial

namespace parallel {

void affine(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
std::vector<double> column_sum(const Matrix& x);

}  // namespace parallel

void affine(Execution exec, const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
void matmul_nt(Execution exec, const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn(Execution exec, const Matrix& a, const Matrix& b, Matrix& out);
std::vector<double> column_sum(Execution exec, const Matrix& x);

/// True when the library was compiled with OpenMP.
bool openmp_enabled();
int max_threads();

}  // namespace ttaforge::kernels
