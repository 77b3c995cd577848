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

#pragma once

// Genetic interacting particle method for the principal eigenvalue mu of
//   A = kappa Laplacian + b . grad + c,   b = -2 kappa lambda e + v,
//   c = kappa lambda^2 - lambda v.e + f'(0).
//
// Each generation runs H mutation/selection steps of length dt:
//   mutation   x~ = x + b(x) dt + sqrt(2 kappa dt) w
//   fitness    S_l = exp(c(x~_l) dt),  E = log(mean S) / dt
//   selection  multinomial resampling with weights S / sum(S)
// and reports mu_j = mean of its H fitness growth rates.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kppfl/flow_model.hpp"

namespace kppfl {

enum class DomainKind { torus, unbounded };

/// Torus [0, L_1) x ... x [0, L_d), or R^d with `period` giving the cell
/// used for initialization and visualization.
struct DomainSpec {
    DomainKind kind = DomainKind::torus;
    std::vector<double> period;

    static DomainSpec torus(std::vector<double> period);
    static DomainSpec unbounded(std::vector<double> cell);

    int dim() const noexcept { return static_cast<int>(period.size()); }
    void validate() const;
};

enum class InitialMeasure { uniform_on_cell, gaussian };

struct IpmParams {
    int n_particles = 10000;
    int n_generations = 64;
    int n_mutations = 32;
    double dt = 1.0 / 256.0;
    std::uint64_t seed = 0;
    bool dynamic_shift = false;
    /// When false, particles are never resampled and each generation reports
    /// the raw Feynman-Kac average over its own span.
    bool selection = true;
    InitialMeasure init = InitialMeasure::uniform_on_cell;

    double generation_time() const noexcept { return n_mutations * dt; }
    void validate() const;
};

struct ParticleEnsemble {
    int dim = 0;
    std::vector<double> positions; // row-major, size() * dim
    int generation = 0;
    int mutation = 0;
    DomainSpec domain;

    std::size_t size() const noexcept
    {
        return dim == 0 ? 0 : positions.size() / static_cast<std::size_t>(dim);
    }
    std::span<const double> particle(std::size_t l) const
    {
        return {positions.data() + l * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

struct MuTrace {
    int n_mutations = 0;
    std::vector<double> per_mutation_pfgr;  // generation-major
    std::vector<double> per_generation_mu;

    double final_mu() const;
    /// Mean of the last `count` generation estimates.
    double tail_mean(int count) const;
};

struct IpmResult {
    MuTrace trace;
    ParticleEnsemble final_ensemble;
};

/// Called after each generation (after any dynamic shift) with the 1-based
/// generation number.
using GenerationObserver = std::function<void(int generation, const ParticleEnsemble&)>;

ParticleEnsemble init_ensemble(const DomainSpec& domain, InitialMeasure init, int n,
                               std::uint64_t seed);

/// Euler-Maruyama step of every particle. Noise is keyed by
/// (seed, generation, mutation, particle); `with_noise = false` leaves the
/// pure drift step.
ParticleEnsemble mutation_step(const ParticleEnsemble& ensemble, const FlowModel& flow,
                               const DualVariable& dual, const KppParams& kpp, double dt,
                               std::uint64_t seed, bool with_noise = true);

/// Coordinate-wise modulo into [0, L) on a torus; identity on R^d.
ParticleEnsemble restrict_to_domain(const ParticleEnsemble& ensemble);

struct Fitness {
    std::vector<double> weights;
    double pfgr = 0.0;
};

/// Normalized weights and log(mean exp(log_fitness)) / dt, via log-sum-exp.
/// `log_fitness` holds c(x~) dt per particle.
Fitness fitness_weights(std::span<const double> log_fitness, double dt);

Fitness fitness_weights(const ParticleEnsemble& pre_selection, const FlowModel& flow,
                        const DualVariable& dual, const KppParams& kpp, double dt);

/// N i.i.d. categorical draws (alias method). Uniforms are keyed by
/// (seed, generation, mutation, output slot).
std::vector<std::uint32_t> multinomial_ancestors(std::span<const double> weights,
                                                 std::uint64_t seed, int generation, int mutation);

ParticleEnsemble resample_multinomial(const ParticleEnsemble& pre_selection,
                                      std::span<const double> weights, std::uint64_t seed);

/// Adds 2 kappa lambda T e to every particle (unbounded domains only).
ParticleEnsemble dynamic_shift(const ParticleEnsemble& ensemble, const DualVariable& dual,
                               const KppParams& kpp, double generation_time);

/// Runs M generations and returns the full trace plus the final ensemble.
IpmResult run_ipm(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                  const IpmParams& params, const DomainSpec& domain,
                  const GenerationObserver& observer = {});

} // namespace kppfl
