// SPDX-License-Identifier: Apache-2.0
//
// cssound - compressed-sensing channel sounding for WLAN MU-MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cssound/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cssound;

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (auto& v : m.data())
    {
        const double re = g(rng);
        v = {re, g(rng)};
    }
    return m;
}

void bm_fft(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_matrix(n, 1, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(fft(x.data()));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_fft)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void bm_fft2d(benchmark::State& state)
{
    const auto h = random_matrix(256, 8, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(fft2d(h));
}
BENCHMARK(bm_fft2d);

void bm_kron_operator(benchmark::State& state)
{
    const auto n_kappa = static_cast<std::size_t>(state.range(0));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n_kappa; ++i)
        rows.push_back(i * 8 + (i % 8));
    for (auto _ : state)
        benchmark::DoNotOptimize(MeasurementOperator::from_kron_rows({256, 8}, rows));
}
BENCHMARK(bm_kron_operator)->Arg(100)->Arg(200)->Arg(256);

void bm_run_experiment(benchmark::State& state)
{
    Experiment e;
    e.n_kappa = static_cast<std::size_t>(state.range(0));
    std::size_t trial = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_experiment(e, trial++));
}
BENCHMARK(bm_run_experiment)->Arg(200)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
