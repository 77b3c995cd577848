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

#include <numbers>

#include <benchmark/benchmark.h>

#include "kppfl/flow_model.hpp"
#include "kppfl/random_field.hpp"

namespace {

using namespace kppfl;

const double kDeltaK = 1.0 / (20.0 * std::numbers::pi);

void BM_FieldEval(benchmark::State& state)
{
    const auto field = sample_realization(SpectralDensity::preset("k05exp"), kDeltaK,
                                          static_cast<int>(state.range(0)), 1);
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(field(x));
        x += 0.37;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FieldEval)->Arg(100)->Arg(400)->Arg(1600);

void BM_FlowVelocity(benchmark::State& state)
{
    const FlowModel flow(3, BaseFlow::abc3d, 4.0);
    double x[3] = {0.1, 0.2, 0.3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow(x));
        x[0] += 0.01;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FlowVelocity);

} // namespace
