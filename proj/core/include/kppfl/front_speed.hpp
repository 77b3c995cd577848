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

// Front speed from the variational formula
//   c*(z) = inf over (z, lambda e) > 0 of mu(lambda e) / (z, lambda e)
// by grid search in lambda and a configurable search over e.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kppfl/eulerian.hpp"
#include "kppfl/flow_model.hpp"
#include "kppfl/ipm_engine.hpp"

namespace kppfl {

enum class EstimatorKind { ipm, sl_cn, spectral };

std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind estimator_from_string(std::string_view name);

struct ESearch {
    enum class Kind { fixed_to_z, local_cone, global_grid };
    Kind kind = Kind::fixed_to_z;
    double half_angle_deg = 15.0;  // local_cone
    int n_samples = 8;             // local_cone and global_grid

    static ESearch fixed() { return {}; }
    static ESearch cone(double half_angle_deg, int n_samples) { return {Kind::local_cone, half_angle_deg, n_samples}; }
    static ESearch global(int n_samples) { return {Kind::global_grid, 0.0, n_samples}; }
};

/// 16 log-spaced values in [0.125, 8].
std::vector<double> default_lambda_grid();

struct FrontSpeedQuery {
    std::vector<double> z;
    std::vector<double> lambda_grid = default_lambda_grid();
    /// Adds points at a third of the grid's local log-spacing around the
    /// minimizing lambda.
    bool refine = true;
    ESearch e_search;
    EstimatorKind estimator = EstimatorKind::ipm;
};

/// Unit directions searched for a query, all with (z, e) > 0.
std::vector<Vec3> search_directions(std::span<const double> z, const ESearch& search);

struct FrontSpeedSample {
    double lambda = 0.0;
    Vec3 e{};
    double mu = 0.0;
    double ratio = 0.0;
};

struct FrontSpeedResult {
    double c_star = 0.0;
    double lambda_opt = 0.0;
    Vec3 e_opt{};
    double mu_at_opt = 0.0;
    std::vector<FrontSpeedSample> samples;
};

using MuEstimator = std::function<double(const DualVariable&)>;

/// Evaluates mu at every (lambda, e) sample; ties go to the smallest lambda.
FrontSpeedResult compute_front_speed(const FrontSpeedQuery& query, const MuEstimator& estimator);

/// Numerical settings for each estimator.
struct EstimatorConfig {
    IpmParams ipm;
    /// Mean of this many final generations (1 = final generation only).
    int ipm_tail_generations = 1;
    /// Defaults to a torus of the flow's natural period.
    std::optional<DomainSpec> domain;

    int sl_nodes = 128;
    double sl_dt = 0.01;
    int sl_steps = 1000;
    double sl_burn_in = 0.5;

    int spectral_nodes = 32;
    SpectralOptions spectral;
};

MuEstimator make_estimator(EstimatorKind kind, const FlowModel& flow, const KppParams& kpp,
                           const EstimatorConfig& config);

FrontSpeedResult compute_front_speed(const FrontSpeedQuery& query, const FlowModel& flow,
                                     const KppParams& kpp, const EstimatorConfig& config);

struct SweepRow {
    double delta = 0.0;
    double c_star_mean = 0.0;
    double c_star_stderr = 0.0;
    std::vector<FrontSpeedResult> per_seed;
};

/// c*(delta) per realization, averaged across realizations. Each entry of
/// `realizations` is reused for every amplitude via with_delta; the
/// particle seed of realization s is derived from the config seed and s.
std::vector<SweepRow> sweep_amplitude(std::span<const double> deltas, const FrontSpeedQuery& query,
                                      std::span<const FlowModel> realizations, const KppParams& kpp,
                                      const EstimatorConfig& config);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;  // NaN with exactly two points
};

/// Ordinary least squares of log c against log delta.
SlopeFit fit_loglog_slope(std::span<const double> delta, std::span<const double> c);

} // namespace kppfl
