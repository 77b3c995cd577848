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
#include <vector>

#include <benchmark/benchmark.h>

#include "kppfl/flow_model.hpp"
#include "kppfl/ipm_engine.hpp"

namespace {

using namespace kppfl;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::vector<double> kX{1.0, 0.0};

void BM_MutationStep(benchmark::State& state)
{
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    const int n = static_cast<int>(state.range(0));
    const auto ens = init_ensemble(DomainSpec::torus({kTwoPi, kTwoPi}), InitialMeasure::uniform_on_cell, n, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mutation_step(ens, flow, DualVariable(1.0, kX), KppParams{}, 1.0 / 256.0, ++seed));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_MutationStep)->Arg(10000)->Arg(100000);

void BM_SelectionStep(benchmark::State& state)
{
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    const DualVariable dual(1.0, kX);
    const int n = static_cast<int>(state.range(0));
    const auto ens = init_ensemble(DomainSpec::torus({kTwoPi, kTwoPi}), InitialMeasure::uniform_on_cell, n, 2);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const Fitness fit = fitness_weights(ens, flow, dual, KppParams{}, 1.0 / 256.0);
        benchmark::DoNotOptimize(resample_multinomial(ens, fit.weights, ++seed));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SelectionStep)->Arg(10000)->Arg(100000);

void BM_Generation(benchmark::State& state)
{
    const FlowModel flow(2, BaseFlow::cellular2d, 4.0);
    IpmParams p;
    p.n_particles = 10000;
    p.n_generations = 1;
    p.n_mutations = 32;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ipm(flow, DualVariable(1.0, kX), KppParams{}, p, DomainSpec::torus({kTwoPi, kTwoPi})));
        ++p.seed;
    }
}
BENCHMARK(BM_Generation)->Unit(benchmark::kMillisecond);

} // namespace
