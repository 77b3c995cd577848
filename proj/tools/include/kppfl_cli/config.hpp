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

// Run configuration: one JSON document per invocation. Parsing rejects
// unknown keys and range-checks every value, throwing ConfigError.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kppfl/eulerian.hpp"
#include "kppfl/flow_model.hpp"
#include "kppfl/front_speed.hpp"
#include "kppfl/ipm_engine.hpp"
#include "kppfl/random_field.hpp"

namespace kppfl::cli {

struct PerturbationConfig {
    std::string spectrum = "k05exp";
    double delta_k = 0.0;  // 0 selects 1 / (20 pi)
    int n_modes = 400;
    double epsilon = 1.0;
    int component = 1;
    std::uint64_t realization = 0;

    bool operator==(const PerturbationConfig&) const = default;
};

struct FlowConfig {
    int dim = 2;
    std::string base = "cellular2d";
    double delta = 1.0;
    std::optional<PerturbationConfig> perturbation;

    bool operator==(const FlowConfig&) const = default;
};

struct DualConfig {
    double lambda = 1.0;
    std::vector<double> e{1.0, 0.0};

    bool operator==(const DualConfig&) const = default;
};

struct KppConfig {
    double kappa = 1.0;
    double f_prime0 = 1.0;

    bool operator==(const KppConfig&) const = default;
};

struct IpmConfig {
    int n_particles = 10000;
    int n_generations = 64;
    int n_mutations = 32;
    double dt = 1.0 / 256.0;
    bool dynamic_shift = false;
    std::string init = "uniform_on_cell";
    int tail_generations = 1;

    bool operator==(const IpmConfig&) const = default;
};

struct DomainConfig {
    std::string kind = "torus";
    std::vector<double> period;  // empty selects the flow's natural period

    bool operator==(const DomainConfig&) const = default;
};

struct EstimatorSettings {
    std::string kind = "ipm";
    int sl_nodes = 128;
    double sl_dt = 0.01;
    int sl_steps = 1000;
    double sl_burn_in = 0.5;
    int spectral_nodes = 32;
    int spectral_max_size = 4096;

    bool operator==(const EstimatorSettings&) const = default;
};

struct FrontSpeedConfig {
    std::vector<double> z{1.0, 0.0};
    std::vector<double> lambda_grid = default_lambda_grid();
    bool refine = true;
    std::string e_search = "fixed_to_z";
    double half_angle_deg = 15.0;
    int n_samples = 8;

    bool operator==(const FrontSpeedConfig&) const = default;
};

struct SweepConfig {
    std::vector<double> deltas;  // empty: the flow's own delta
    int n_realizations = 1;

    bool operator==(const SweepConfig&) const = default;
};

struct StatsConfig {
    int histogram_bins = 50;
    double tail_fraction = 0.5;
    int correlation_seeds = 200;
    std::vector<double> correlation_r{0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    bool project_snapshot = false;

    bool operator==(const StatsConfig&) const = default;
};

struct ReferenceConfig {
    std::vector<std::string> methods{"sl_cn", "spectral"};

    bool operator==(const ReferenceConfig&) const = default;
};

struct RunConfig {
    std::uint64_t seed = 0;
    FlowConfig flow;
    DualConfig dual;
    KppConfig kpp;
    IpmConfig ipm;
    DomainConfig domain;
    EstimatorSettings estimator;
    FrontSpeedConfig front_speed;
    SweepConfig sweep;
    StatsConfig stats;
    ReferenceConfig reference;
    std::string output_dir = "kppfl-out";

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json serialize_config(const RunConfig& config);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Builders for library objects. Subsystem seeds derive from `seed`.
std::shared_ptr<const FieldRealization> build_realization(const RunConfig& config,
                                                          std::uint64_t realization_index);
FlowModel build_flow(const RunConfig& config, std::uint64_t realization_index);
DualVariable build_dual(const RunConfig& config);
KppParams build_kpp(const RunConfig& config);
IpmParams build_ipm(const RunConfig& config);
DomainSpec build_domain(const RunConfig& config, const FlowModel& flow);
EstimatorConfig build_estimator_config(const RunConfig& config, const FlowModel& flow);
FrontSpeedQuery build_query(const RunConfig& config);

std::uint64_t ipm_seed(const RunConfig& config);
std::uint64_t field_seed(const RunConfig& config, std::uint64_t realization_index);

} // namespace kppfl::cli
