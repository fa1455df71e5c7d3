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
#include <benchmark/benchmark.h>

#include <vector>

#include "ttaforge/kernels.hpp"
#include "ttaforge/rng.hpp"

namespace {

using ttaforge::Matrix;
using ttaforge::kernels::Execution;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  auto rng = ttaforge::make_rng(seed, rows * 131 + cols);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = ttaforge::normal(rng, 0.0, 1.0);
  return m;
}

template <Execution E>
void BM_Affine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix x = random_matrix(n, d, 1);
  const Matrix w = random_matrix(d, d, 2);
  const std::vector<double> b(d, 0.1);
  Matrix out;
  for (auto _ : state) {
    ttaforge::kernels::affine(E, x, w, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * d * d));
}

template <Execution E>
void BM_MatmulNT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix a = random_matrix(n, d, 3);
  const Matrix b = random_matrix(n, d, 4);
  Matrix out;
  for (auto _ : state) {
    ttaforge::kernels::matmul_nt(E, a, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}

template <Execution E>
void BM_MatmulTN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const Matrix a = random_matrix(n, d, 5);
  const Matrix b = random_matrix(n, d, 6);
  Matrix out;
  for (auto _ : state) {
    ttaforge::kernels::matmul_tn(E, a, b, out);
    benchmark::DoNotOptimize(out.values().data());
  }
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({64, 32})->Args({144, 32})->Args({1024, 64})->Args({4096, 128});
}

}  // namespace

BENCHMARK(BM_Affine<Execution::serial>)->Apply(shapes);
BENCHMARK(BM_Affine<Execution::parallel>)->Apply(shapes);
BENCHMARK(BM_MatmulNT<Execution::serial>)->Apply(shapes);
BENCHMARK(BM_MatmulNT<Execution::parallel>)->Apply(shapes);
BENCHMARK(BM_MatmulTN<Execution::serial>)->Apply(shapes);
BENCHMARK(BM_MatmulTN<Execution::parallel>)->Apply(shapes);

BENCHMARK_MAIN();
