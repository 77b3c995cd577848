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

#include "kppfl/ipm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "kppfl/error.hpp"
#include "kppfl/rng.hpp"

namespace kppfl {

namespace {

using rng::Purpose;
using rng::Stream;

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

void check_dims(const ParticleEnsemble& ens, const FlowModel& flow, const DualVariable& dual)
{
    require(ens.dim == flow.dim(), "ensemble and flow dimensions differ");
    require(ens.dim == dual.dim, "ensemble and dual direction dimensions differ");
}

double wrap(double x, double period) noexcept
{
    double r = x - period * std::floor(x / period);
    // floor can leave r == period for tiny negative x.
    if (r >= period || r < 0.0) {
        r = 0.0;
    }
    return r;
}

// Moves one particle in place; `v` is the velocity at the current position.
inline void euler_step(double* x, const Vec3& v, const DualVariable& dual, const KppParams& kpp,
                       double dt, double sigma, const Stream* noise, std::uint32_t particle,
                       std::uint32_t mutation, std::uint32_t generation, int dim) noexcept
{
    std::array<double, 4> w{};
    if (noise != nullptr) {
        const auto n01 = noise->normals(particle, mutation, generation, 0);
        w[0] = n01[0];
        w[1] = n01[1];
        if (dim > 2) {
            const auto n23 = noise->normals(particle, mutation, generation, 1);
            w[2] = n23[0];
            w[3] = n23[1];
        }
    }
    const double shift = 2.0 * kpp.kappa * dual.lambda;
    for (int k = 0; k < dim; ++k) {
        const double b = v[k] - shift * dual.e[k];
        x[k] = x[k] + b * dt + sigma * w[k];
    }
}

[[noreturn]] void throw_blow_up(std::size_t particle, int generation, int mutation)
{
    std::ostringstream msg;
    msg << "non-finite position for particle " << particle << " at generation " << generation
        << ", mutation " << mutation;
    throw BlowUpError(msg.str());
}

void check_finite(std::span<const double> positions, int dim, int generation, int mutation)
{
    bool ok = true;
#pragma omp parallel for reduction(&& : ok) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(positions.size()); ++i) {
        ok = ok && std::isfinite(positions[static_cast<std::size_t>(i)]);
    }
    if (ok) {
        return;
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i])) {
            throw_blow_up(i / static_cast<std::size_t>(dim), generation, mutation);
        }
    }
}

// Vose alias table for O(1) categorical draws.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights)
        : prob_(weights.size(), 1.0), alias_(weights.size())
    {
        const std::size_t n = weights.size();
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small;
        std::vector<std::uint32_t> large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n);
            alias_[i] = u32(i);
            (scaled[i] < 1.0 ? small : large).push_back(u32(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            small.pop_back();
            const std::uint32_t l = large.back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        // Leftovers carry probability 1 up to rounding.
    }

    std::uint32_t draw(double u_column, double u_accept) const noexcept
    {
        const std::size_t n = prob_.size();
        const std::size_t k =
            std::min(n - 1, static_cast<std::size_t>(u_column * static_cast<double>(n)));
        return u_accept < prob_[k] ? u32(k) : alias_[k];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

void validate_weights(std::span<const double> weights)
{
    require(!weights.empty(), "resampling needs at least one weight");
    double sum = 0.0;
    for (double w : weights) {
        require(std::isfinite(w) && w >= 0.0, "weights must be finite and nonnegative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "weights must sum to 1");
}

std::vector<std::uint32_t> draw_ancestors(const AliasTable& table, std::size_t n,
                                          std::uint64_t seed, int generation, int mutation)
{
    const Stream stream(seed, Purpose::selection);
    std::vector<std::uint32_t> ancestors(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(n); ++l) {
        const auto u = stream.uniforms(u32(static_cast<std::size_t>(l)), u32(mutation), u32(generation));
        ancestors[static_cast<std::size_t>(l)] = table.draw(u[0], u[1]);
    }
    return ancestors;
}

template <typename T>
void gather(std::vector<T>& out, const std::vector<T>& in, std::span<const std::uint32_t> ancestors,
            std::size_t stride)
{
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(ancestors.size()); ++l) {
        const std::size_t dst = static_cast<std::size_t>(l) * stride;
        const std::size_t src = static_cast<std::size_t>(ancestors[static_cast<std::size_t>(l)]) * stride;
        std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(src), stride,
                    out.begin() + static_cast<std::ptrdiff_t>(dst));
    }
}

// log(sum exp(a)) with the max shifted out.
double log_sum_exp(std::span<const double> a, double& max_out)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : a) {
        m = std::max(m, x);
    }
    max_out = m;
    if (!std::isfinite(m)) {
        return m;
    }
    // Fixed-size blocks summed in index order keep the result independent of
    // the worker count.
    constexpr std::size_t kBlock = 4096;
    const std::size_t n_blocks = (a.size() + kBlock - 1) / kBlock;
    std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(a.size(), lo + kBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += std::exp(a[i] - m);
        }
        partial[static_cast<std::size_t>(b)] = s;
    }
    double s = 0.0;
    for (const double p : partial) {
        s += p;
    }
    return m + std::log(s);
}

} // namespace

DomainSpec DomainSpec::torus(std::vector<double> period)
{
    DomainSpec d{DomainKind::torus, std::move(period)};
    d.validate();
    return d;
}

DomainSpec DomainSpec::unbounded(std::vector<double> cell)
{
    DomainSpec d{DomainKind::unbounded, std::move(cell)};
    d.validate();
    return d;
}

void DomainSpec::validate() const
{
    require(dim() >= 1 && dim() <= 3, "domain dimension must be 1, 2 or 3");
    for (double p : period) {
        require(std::isfinite(p) && p > 0.0, "domain period must be positive");
    }
}

void IpmParams::validate() const
{
    require(n_particles >= 2, "IPM needs at least two particles");
    require(n_generations >= 1, "IPM needs at least one generation");
    require(n_mutations >= 1, "IPM needs at least one mutation per generation");
    require(std::isfinite(dt) && dt > 0.0, "IPM time step must be positive");
}

double MuTrace::final_mu() const
{
    require(!per_generation_mu.empty(), "empty trace");
    return per_generation_mu.back();
}

double MuTrace::tail_mean(int count) const
{
    require(count >= 1 && static_cast<std::size_t>(count) <= per_generation_mu.size(),
            "tail length out of range");
    const auto first = per_generation_mu.end() - count;
    return std::accumulate(first, per_generation_mu.end(), 0.0) / count;
}

ParticleEnsemble init_ensemble(const DomainSpec& domain, InitialMeasure init, int n,
                               std::uint64_t seed)
{
    domain.validate();
    require(n >= 2, "IPM needs at least two particles");
    const int dim = domain.dim();
    ParticleEnsemble ens{dim, std::vector<double>(static_cast<std::size_t>(n) * dim), 0, 0, domain};
    const Stream stream(seed, Purpose::initial_positions);
#pragma omp parallel for schedule(static)
    for (int l = 0; l < n; ++l) {
        double* x = ens.positions.data() + static_cast<std::size_t>(l) * dim;
        for (int k = 0; k < dim; k += 2) {
            const auto draw = static_cast<std::uint32_t>(k / 2);
            const auto u = stream.uniforms(u32(l), 0, 0, draw);
            for (int q = 0; q < 2 && k + q < dim; ++q) {
                const double L = domain.period[k + q];
                x[k + q] = init == InitialMeasure::uniform_on_cell
                               ? wrap(u[q] * L, L)
                               : 0.5 * L + rng::inverse_normal_cdf(u[q]);
            }
        }
    }
    return ens;
}

ParticleEnsemble mutation_step(const ParticleEnsemble& ensemble, const FlowModel& flow,
                               const DualVariable& dual, const KppParams& kpp, double dt,
                               std::uint64_t seed, bool with_noise)
{
    require(std::isfinite(dt) && dt > 0.0, "mutation time step must be positive");
    check_dims(ensemble, flow, dual);
    ParticleEnsemble out = ensemble;
    const int dim = ensemble.dim;
    const Stream stream(seed, Purpose::mutation_noise);
    const Stream* noise = with_noise ? &stream : nullptr;
    const double sigma = std::sqrt(2.0 * kpp.kappa * dt);
    const auto n = static_cast<std::ptrdiff_t>(ensemble.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < n; ++l) {
        double* x = out.positions.data() + l * dim;
        const Vec3 v = flow(x);
        euler_step(x, v, dual, kpp, dt, sigma, noise, u32(static_cast<std::size_t>(l)),
                   u32(ensemble.mutation), u32(ensemble.generation), dim);
    }
    check_finite(out.positions, dim, ensemble.generation, ensemble.mutation);
    return out;
}

ParticleEnsemble restrict_to_domain(const ParticleEnsemble& ensemble)
{
    ParticleEnsemble out = ensemble;
    if (ensemble.domain.kind != DomainKind::torus) {
        return out;
    }
    require(ensemble.domain.dim() == ensemble.dim, "domain and ensemble dimensions differ");
    const int dim = ensemble.dim;
    for (std::size_t i = 0; i < out.positions.size(); ++i) {
        out.positions[i] = wrap(out.positions[i], ensemble.domain.period[i % dim]);
    }
    return out;
}

Fitness fitness_weights(std::span<const double> log_fitness, double dt)
{
    require(std::isfinite(dt) && dt > 0.0, "fitness time step must be positive");
    require(!log_fitness.empty(), "fitness needs at least one particle");
    double m = 0.0;
    const double lse = log_sum_exp(log_fitness, m);
    if (!std::isfinite(m) || !std::isfinite(lse)) {
        throw DegeneracyError("fitness values cannot be normalized");
    }
    const auto n = static_cast<double>(log_fitness.size());
    Fitness f;
    f.weights.resize(log_fitness.size());
    for (std::size_t l = 0; l < log_fitness.size(); ++l) {
        f.weights[l] = std::exp(log_fitness[l] - lse);
    }
    f.pfgr = (lse - std::log(n)) / dt;
    return f;
}

Fitness fitness_weights(const ParticleEnsemble& pre_selection, const FlowModel& flow,
                        const DualVariable& dual, const KppParams& kpp, double dt)
{
    check_dims(pre_selection, flow, dual);
    const int dim = pre_selection.dim;
    std::vector<double> logf(pre_selection.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(logf.size()); ++l) {
        const Vec3 v = flow(pre_selection.positions.data() + l * dim);
        logf[static_cast<std::size_t>(l)] = potential_from_velocity(v, dual, kpp, dim) * dt;
    }
    return fitness_weights(logf, dt);
}

std::vector<std::uint32_t> multinomial_ancestors(std::span<const double> weights,
                                                 std::uint64_t seed, int generation, int mutation)
{
    validate_weights(weights);
    const AliasTable table(weights);
    return draw_ancestors(table, weights.size(), seed, generation, mutation);
}

ParticleEnsemble resample_multinomial(const ParticleEnsemble& pre_selection,
                                      std::span<const double> weights, std::uint64_t seed)
{
    require(weights.size() == pre_selection.size(), "one weight per particle required");
    const auto ancestors =
        multinomial_ancestors(weights, seed, pre_selection.generation, pre_selection.mutation);
    ParticleEnsemble out = pre_selection;
    gather(out.positions, pre_selection.positions, ancestors, static_cast<std::size_t>(pre_selection.dim));
    return out;
}

ParticleEnsemble dynamic_shift(const ParticleEnsemble& ensemble, const DualVariable& dual,
                               const KppParams& kpp, double generation_time)
{
    if (ensemble.domain.kind == DomainKind::torus) {
        throw ContractError("dynamic shift applies to unbounded domains only");
    }
    require(ensemble.dim == dual.dim, "ensemble and dual direction dimensions differ");
    ParticleEnsemble out = ensemble;
    const double s = 2.0 * kpp.kappa * dual.lambda * generation_time;
    const int dim = ensemble.dim;
    for (std::size_t i = 0; i < out.positions.size(); ++i) {
        out.positions[i] += s * dual.e[i % dim];
    }
    return out;
}

IpmResult run_ipm(const FlowModel& flow, const DualVariable& dual, const KppParams& kpp,
                  const IpmParams& params, const DomainSpec& domain,
                  const GenerationObserver& observer)
{
    params.validate();
    kpp.validate();
    domain.validate();
    const int dim = domain.dim();
    require(flow.dim() == dim && dual.dim == dim, "flow, dual direction and domain dimensions differ");
    if (domain.kind == DomainKind::torus) {
        require(!params.dynamic_shift, "dynamic shift applies to unbounded domains only");
        require(flow.compatible_with_torus(domain.period), "torus is not a union of flow periods");
    }

    const std::size_t n = static_cast<std::size_t>(params.n_particles);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    const int H = params.n_mutations;
    const double dt = params.dt;
    const double sigma = std::sqrt(2.0 * kpp.kappa * dt);
    const bool torus = domain.kind == DomainKind::torus;
    const Stream noise(params.seed, Purpose::mutation_noise);

    ParticleEnsemble ens = init_ensemble(domain, params.init, params.n_particles, params.seed);

    // Velocity at each particle's current position, carried through selection.
    std::vector<Vec3> vel(n);
    std::vector<Vec3> vel_next(n);
    std::vector<double> pos_next(ens.positions.size());
    std::vector<double> logf(n);
    std::vector<double> cum_logw;  // selection disabled: running log-weights
    std::vector<double> weights(n);

    auto refresh_velocity = [&] {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t l = 0; l < sn; ++l) {
            vel[static_cast<std::size_t>(l)] = flow(ens.positions.data() + l * dim);
        }
    };
    refresh_velocity();

    IpmResult result;
    result.trace.n_mutations = H;
    result.trace.per_mutation_pfgr.reserve(static_cast<std::size_t>(params.n_generations) * H);
    result.trace.per_generation_mu.reserve(static_cast<std::size_t>(params.n_generations));

    for (int g = 0; g < params.n_generations; ++g) {
        if (!params.selection) {
            cum_logw.assign(n, 0.0);
        }
        double prev_lse = std::log(static_cast<double>(n));
        double mu_sum = 0.0;
        for (int i = 0; i < H; ++i) {
            ens.generation = g;
            ens.mutation = i;
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t l = 0; l < sn; ++l) {
                const auto ul = static_cast<std::size_t>(l);
                double* x = ens.positions.data() + l * dim;
                euler_step(x, vel[ul], dual, kpp, dt, sigma, &noise, u32(ul), u32(i), u32(g), dim);
                if (torus) {
                    for (int k = 0; k < dim; ++k) {
                        x[k] = wrap(x[k], domain.period[k]);
                    }
                }
                vel[ul] = flow(x);
                logf[ul] = potential_from_velocity(vel[ul], dual, kpp, dim) * dt;
            }
            check_finite(ens.positions, dim, g + 1, i + 1);

            double pfgr = 0.0;
            if (params.selection) {
                Fitness fit;
                try {
                    fit = fitness_weights(logf, dt);
                } catch (const DegeneracyError&) {
                    std::ostringstream msg;
                    msg << "fitness degenerate at generation " << g + 1 << ", mutation " << i + 1;
                    throw DegeneracyError(msg.str());
                }
                pfgr = fit.pfgr;
                const AliasTable table(fit.weights);
                const auto ancestors = draw_ancestors(table, n, params.seed, g, i);
                gather(pos_next, ens.positions, ancestors, static_cast<std::size_t>(dim));
                gather(vel_next, vel, ancestors, 1);
                ens.positions.swap(pos_next);
                vel.swap(vel_next);
            } else {
                for (std::size_t l = 0; l < n; ++l) {
                    cum_logw[l] += logf[l];
                }
                double m = 0.0;
                const double lse = log_sum_exp(cum_logw, m);
                if (!std::isfinite(lse)) {
                    throw DegeneracyError("accumulated weights cannot be normalized");
                }
                pfgr = (lse - prev_lse) / dt;
                prev_lse = lse;
            }
            result.trace.per_mutation_pfgr.push_back(pfgr);
            mu_sum += pfgr;
        }
        result.trace.per_generation_mu.push_back(mu_sum / H);
        ens.generation = g + 1;
        ens.mutation = 0;
        if (params.dynamic_shift) {
            ens = dynamic_shift(ens, dual, kpp, params.generation_time());
            refresh_velocity();
        }
        if (observer) {
            observer(g + 1, ens);
        }
    }
    result.final_ensemble = std::move(ens);
    return result;
}

} // namespace kppfl
