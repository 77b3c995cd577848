/*
   Copyright 2026 The kppfl Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <array>
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "kppfl/eulerian.hpp"
#include "kppfl/flow_model.hpp"

namespace {

using namespace kppfl;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::vector<double> kX{1.0, 0.0};

void BM_SlCnStep(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    const SlCnStepper stepper({n, n}, {kTwoPi, kTwoPi}, flow, DualVariable(1.0, kX), KppParams{}, 0.01);
    auto grid = EulerianGrid::uniform({n, n}, {kTwoPi, kTwoPi});
    for (auto _ : state) {
        benchmark::DoNotOptimize(stepper.step(grid));
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SlCnStep)->Arg(64)->Arg(128)->Arg(256);

void BM_SpectralEigen(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_eigen(flow, DualVariable(1.0, kX), KppParams{}, {n, n}, {kTwoPi, kTwoPi}));
    }
}
BENCHMARK(BM_SpectralEigen)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

} // namespace
