// SPDX-License-Identifier: Apache-2.0
//
// mmxr - millimeter-wave interactive XR downlink simulator
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

// Parallel kernels against their serial references.

#include "mmxr/array.hpp"
#include "mmxr/codebook.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace mmxr;

namespace
{

std::vector<Direction> directions(std::size_t n)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(-std::numbers::pi / 2, std::numbers::pi / 2);
    std::uniform_real_distribution<double> el(-std::numbers::pi / 3, std::numbers::pi / 3);
    std::vector<Direction> out(n);
    for (Direction &d : out)
        d = {az(rng), el(rng)};
    return out;
}

ArrayGeometry square(int n)
{
    ArrayGeometry g;
    g.rows = g.cols = n;
    return g;
}

template <auto Kernel>
void gain_map_bench(benchmark::State &state)
{
    const ArrayGeometry g = square(static_cast<int>(state.range(0)));
    const Awv awv = steering_phases(g, {0.3, -0.1});
    const auto dirs = directions(4096);
    for (auto _ : state)
        benchmark::DoNotOptimize(Kernel(g, awv, dirs));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dirs.size()));
}

template <auto Kernel>
void quasi_omni_bench(benchmark::State &state)
{
    const ArrayGeometry g = square(static_cast<int>(state.range(0)));
    QuasiOmniOptions options;
    options.n_samples = 500;
    options.max_iters = 8;
    for (auto _ : state)
        benchmark::DoNotOptimize(Kernel(g, options));
}

} // namespace

BENCHMARK(gain_map_bench<gain_map>)->Name("gain_map")->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(gain_map_bench<gain_map_reference>)->Name("gain_map_reference")->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(quasi_omni_bench<synthesize_quasi_omni>)->Name("quasi_omni")->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(quasi_omni_bench<synthesize_quasi_omni_serial>)->Name("quasi_omni_serial")->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
