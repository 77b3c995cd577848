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

#include "kppfl/front_speed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "kppfl/error.hpp"
#include "kppfl/rng.hpp"
#include "line_fit.hpp"

namespace kppfl {

namespace {

constexpr double kAdmissible = 1e-12;

Vec3 unit_vector(std::span<const double> v)
{
    require(v.size() == 2 || v.size() == 3, "direction must have 2 or 3 components");
    double n2 = 0.0;
    for (double c : v) {
        n2 += c * c;
    }
    require(n2 > 0.0 && std::isfinite(n2), "direction must be nonzero");
    const double n = std::sqrt(n2);
    Vec3 u{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        u[i] = v[i] / n;
    }
    return u;
}

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(Vec3 v) noexcept
{
    const double n = std::sqrt(dot(v, v));
    return {v[0] / n, v[1] / n, v[2] / n};
}

std::string describe(double lambda, const Vec3& e, int dim)
{
    std::ostringstream s;
    s << "at lambda=" << lambda << ", e=(";
    for (int i = 0; i < dim; ++i) {
        s << (i ? "," : "") << e[i];
    }
    s << "): ";
    return s.str();
}

double evaluate(const MuEstimator& estimator, double lambda, const Vec3& e, int dim)
{
    const DualVariable dual(lambda, std::span<const double>(e.data(), static_cast<std::size_t>(dim)));
    try {
        return estimator(dual);
    } catch (const ConvergenceError& err) {
        throw ConvergenceError(describe(lambda, e, dim) + err.what(), err.residual());
    } catch (const BlowUpError& err) {
        throw BlowUpError(describe(lambda, e, dim) + err.what());
    } catch (const DegeneracyError& err) {
        throw DegeneracyError(describe(lambda, e, dim) + err.what());
    } catch (const CapacityError& err) {
        throw CapacityError(describe(lambda, e, dim) + err.what());
    } catch (const ContractError& err) {
        throw ContractError(describe(lambda, e, dim) + err.what());
    } catch (const Error& err) {
        throw Error(describe(lambda, e, dim) + err.what());
    }
}

bool better(const FrontSpeedSample& a, const FrontSpeedSample& b) noexcept
{
    return a.ratio < b.ratio || (a.ratio == b.ratio && a.lambda < b.lambda);
}

} // namespace

std::string_view to_string(EstimatorKind kind) noexcept
{
    switch (kind) {
    case EstimatorKind::ipm:
        return "ipm";
    case EstimatorKind::sl_cn:
        return "sl_cn";
    case EstimatorKind::spectral:
        return "spectral";
    }
    return "ipm";
}

EstimatorKind estimator_from_string(std::string_view name)
{
    for (EstimatorKind k : {EstimatorKind::ipm, EstimatorKind::sl_cn, EstimatorKind::spectral}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ContractError("unknown estimator '" + std::string(name) + "'");
}

std::vector<double> default_lambda_grid()
{
    std::vector<double> grid(16);
    for (int i = 0; i < 16; ++i) {
        grid[static_cast<std::size_t>(i)] = 0.125 * std::pow(64.0, i / 15.0);
    }
    return grid;
}

std::vector<Vec3> search_directions(std::span<const double> z_in, const ESearch& search)
{
    const int dim = static_cast<int>(z_in.size());
    const Vec3 z = unit_vector(z_in);
    std::vector<Vec3> dirs;
    switch (search.kind) {
    case ESearch::Kind::fixed_to_z:
        dirs.push_back(z);
        break;
    case ESearch::Kind::local_cone: {
        require(search.half_angle_deg > 0.0 && search.half_angle_deg < 90.0,
                "cone half-angle must lie in (0, 90) degrees");
        require(search.n_samples >= 1, "cone needs at least one sample");
        const double h = search.half_angle_deg * std::numbers::pi / 180.0;
        dirs.push_back(z);
        if (dim == 2) {
            const double theta = std::atan2(z[1], z[0]);
            const int n = search.n_samples;
            for (int k = 0; k < n; ++k) {
                const double a = n == 1 ? h : -h + 2.0 * h * k / (n - 1);
                if (std::abs(a) < 1e-15) {
                    continue;
                }
                dirs.push_back({std::cos(theta + a), std::sin(theta + a), 0.0});
            }
        } else {
            const Vec3 helper = std::abs(z[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
            const Vec3 u = normalized(cross(z, helper));
            const Vec3 w = cross(z, u);
            for (int k = 0; k < search.n_samples; ++k) {
                const double phi = 2.0 * std::numbers::pi * k / search.n_samples;
                Vec3 e{};
                for (int i = 0; i < 3; ++i) {
                    e[i] = std::cos(h) * z[i] + std::sin(h) * (std::cos(phi) * u[i] + std::sin(phi) * w[i]);
                }
                dirs.push_back(normalized(e));
            }
        }
        break;
    }
    case ESearch::Kind::global_grid: {
        require(search.n_samples >= 1, "global grid needs at least one sample");
        const int n = search.n_samples;
        for (int k = 0; k < n; ++k) {
            Vec3 e{};
            if (dim == 2) {
                const double theta = 2.0 * std::numbers::pi * k / n;
                e = {std::cos(theta), std::sin(theta), 0.0};
            } else {
                // Fibonacci lattice on the sphere.
                const double y = 1.0 - 2.0 * (k + 0.5) / n;
                const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
                const double phi = std::numbers::pi * (3.0 - std::sqrt(5.0)) * k;
                e = {r * std::cos(phi), y, r * std::sin(phi)};
            }
            if (dot(e, z) > kAdmissible) {
                dirs.push_back(e);
            }
        }
        break;
    }
    }
    if (dirs.empty()) {
        throw ContractError("no admissible dual direction in the search set");
    }
    return dirs;
}

FrontSpeedResult compute_front_speed(const FrontSpeedQuery& query, const MuEstimator& estimator)
{
    require(!query.lambda_grid.empty(), "lambda grid must be nonempty");
    for (double l : query.lambda_grid) {
        require(std::isfinite(l) && l > 0.0, "lambda grid values must be positive");
    }
    const int dim = static_cast<int>(query.z.size());
    const Vec3 z = unit_vector(query.z);
    const auto dirs = search_directions(query.z, query.e_search);

    std::vector<double> grid = query.lambda_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    FrontSpeedResult result;
    auto add = [&](double lambda, const Vec3& e) {
        const double mu = evaluate(estimator, lambda, e, dim);
        result.samples.push_back({lambda, e, mu, mu / (lambda * dot(z, e))});
    };
    auto best = [&] {
        return *std::min_element(result.samples.begin(), result.samples.end(),
                                 [](const auto& a, const auto& b) { return better(a, b); });
    };

    for (double lambda : grid) {
        for (const Vec3& e : dirs) {
            add(lambda, e);
        }
    }
    if (query.refine && grid.size() >= 2) {
        const FrontSpeedSample coarse = best();
        const auto k = static_cast<std::size_t>(
            std::find(grid.begin(), grid.end(), coarse.lambda) - grid.begin());
        if (k > 0) {
            const double r = grid[k - 1] / coarse.lambda;
            add(coarse.lambda * std::pow(r, 2.0 / 3.0), coarse.e);
            add(coarse.lambda * std::pow(r, 1.0 / 3.0), coarse.e);
        }
        if (k + 1 < grid.size()) {
            const double r = grid[k + 1] / coarse.lambda;
            add(coarse.lambda * std::pow(r, 1.0 / 3.0), coarse.e);
            add(coarse.lambda * std::pow(r, 2.0 / 3.0), coarse.e);
        }
    }
    const FrontSpeedSample opt = best();
    result.c_star = opt.ratio;
    result.lambda_opt = opt.lambda;
    result.e_opt = opt.e;
    result.mu_at_opt = opt.mu;
    return result;
}

MuEstimator make_estimator(EstimatorKind kind, const FlowModel& flow, const KppParams& kpp,
                           const EstimatorConfig& config)
{
    kpp.validate();
    switch (kind) {
    case EstimatorKind::ipm: {
        config.ipm.validate();
        const DomainSpec domain = config.domain ? *config.domain : DomainSpec::torus(flow.natural_period());
        require(config.ipm_tail_generations >= 1 &&
                    config.ipm_tail_generations <= config.ipm.n_generations,
                "tail generation count out of range");
        return [flow, kpp, domain, ipm = config.ipm, tail = config.ipm_tail_generations](const DualVariable& dual) {
            return run_ipm(flow, dual, kpp, ipm, domain).trace.tail_mean(tail);
        };
    }
    case EstimatorKind::sl_cn: {
        require(flow.dim() == 2, "SL-CN estimator is two-dimensional");
        const auto p = flow.natural_period();
        const std::array<double, 2> period{p[0], p[1]};
        const std::array<int, 2> n{config.sl_nodes, config.sl_nodes};
        return [flow, kpp, period, n, c = config](const DualVariable& dual) {
            return run_mu_sl(EulerianGrid::uniform(n, period), flow, dual, kpp, c.sl_dt, c.sl_steps,
                             c.sl_burn_in)
                .mu;
        };
    }
    case EstimatorKind::spectral: {
        require(flow.dim() == 2, "spectral estimator is two-dimensional");
        const auto p = flow.natural_period();
        const auto minimal = flow.minimal_period();
        const std::array<double, 2> period{p[0], p[1]};
        // Axes the flow does not vary along carry a single node.
        const std::array<int, 2> n{minimal[0] == 0.0 ? 1 : config.spectral_nodes,
                                   minimal[1] == 0.0 ? 1 : config.spectral_nodes};
        return [flow, kpp, period, n, opts = config.spectral](const DualVariable& dual) {
            return spectral_eigen(flow, dual, kpp, n, period, opts).mu;
        };
    }
    }
    throw ContractError("unknown estimator");
}

FrontSpeedResult compute_front_speed(const FrontSpeedQuery& query, const FlowModel& flow,
                                     const KppParams& kpp, const EstimatorConfig& config)
{
    require(static_cast<int>(query.z.size()) == flow.dim(), "z and flow dimensions differ");
    return compute_front_speed(query, make_estimator(query.estimator, flow, kpp, config));
}

std::vector<SweepRow> sweep_amplitude(std::span<const double> deltas, const FrontSpeedQuery& query,
                                      std::span<const FlowModel> realizations, const KppParams& kpp,
                                      const EstimatorConfig& config)
{
    require(!deltas.empty(), "amplitude list must be nonempty");
    require(!realizations.empty(), "at least one realization is required");
    std::vector<SweepRow> rows;
    rows.reserve(deltas.size());
    for (double delta : deltas) {
        require(std::isfinite(delta) && delta >= 0.0, "amplitudes must be nonnegative");
        SweepRow row;
        row.delta = delta;
        for (std::size_t s = 0; s < realizations.size(); ++s) {
            EstimatorConfig cfg = config;
            cfg.ipm.seed = rng::derive_seed(config.ipm.seed, "sweep", s);
            row.per_seed.push_back(
                compute_front_speed(query, realizations[s].with_delta(delta), kpp, cfg));
        }
        const auto n = static_cast<double>(row.per_seed.size());
        double sum = 0.0;
        for (const auto& r : row.per_seed) {
            sum += r.c_star;
        }
        row.c_star_mean = sum / n;
        if (row.per_seed.size() >= 2) {
            double ss = 0.0;
            for (const auto& r : row.per_seed) {
                ss += (r.c_star - row.c_star_mean) * (r.c_star - row.c_star_mean);
            }
            row.c_star_stderr = std::sqrt(ss / (n - 1.0) / n);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

SlopeFit fit_loglog_slope(std::span<const double> delta, std::span<const double> c)
{
    require(delta.size() == c.size(), "slope fit needs matching arrays");
    require(delta.size() >= 2, "slope fit needs at least two points");
    std::vector<double> x(delta.size());
    std::vector<double> y(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        require(delta[i] > 0.0 && c[i] > 0.0 && std::isfinite(delta[i]) && std::isfinite(c[i]),
                "slope fit needs positive values");
        x[i] = std::log(delta[i]);
        y[i] = std::log(c[i]);
    }
    const detail::LineFit line = detail::fit_line(x, y);
    return {line.slope, line.intercept, line.stderr_slope};
}

} // namespace kppfl
