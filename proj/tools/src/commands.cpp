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

#include "kppfl_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kppfl/ensemble_stats.hpp"
#include "kppfl/error.hpp"
#include "kppfl/eulerian.hpp"
#include "kppfl/front_speed.hpp"
#include "kppfl/ipm_engine.hpp"
#include "kppfl/random_field.hpp"
#include "kppfl/rng.hpp"
#include "kppfl/table_io.hpp"

#ifndef KPPFL_VERSION
#define KPPFL_VERSION "unknown"
#endif

namespace kppfl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename Fn>
std::string to_text(Fn&& fn)
{
    std::ostringstream out;
    fn(out);
    return out.str();
}

json base_seeds(const RunConfig& config)
{
    return {{"master", config.seed}, {"ipm", ipm_seed(config)}};
}

} // namespace

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

OutputSet::OutputSet(const fs::path& root, std::string command, const RunConfig& config)
    : dir_(root / (command + "-" + config_hash(config))), command_(std::move(command)), config_(config)
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }
}

void OutputSet::write(const std::string& name, const std::string& content)
{
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    checksums_[name] = fnv1a_hex(content);
}

json OutputSet::finalize(json results, json seeds, double wall_clock_seconds)
{
    json manifest{{"command", command_},
                  {"code_version", KPPFL_VERSION},
                  {"config_hash", config_hash(config_)},
                  {"config", serialize_config(config_)},
                  {"outputs", checksums_},
                  {"results", std::move(results)},
                  {"seeds", std::move(seeds)},
                  {"wall_clock_seconds", wall_clock_seconds}};
    std::ofstream out(dir_ / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw Error("cannot write manifest");
    }
    return manifest;
}

json cmd_gen_field(const RunConfig& config, const fs::path& out_root)
{
    const Stopwatch clock;
    if (!config.flow.perturbation) {
        throw ConfigError("flow.perturbation: required by gen-field");
    }
    const auto field = build_realization(config, 0);
    const PerturbationConfig& p = *config.flow.perturbation;
    OutputSet out(out_root, "gen-field", config);
    out.write("field.json", realization_to_json(*field).dump(2) + "\n");
    out.write("coefficients.csv", to_text([&](std::ostream& s) { write_coefficients_csv(s, *field); }));

    const std::uint64_t corr_seed = rng::derive_seed(config.seed, "correlation");
    out.write("correlation.csv", to_text([&](std::ostream& s) {
        s << "r,exact_truncated,empirical,std_error\n";
        for (double r : config.stats.correlation_r) {
            const double exact =
                correlation_exact(field->spectrum(), field->delta_k(), 1, r, field->n_modes());
            const auto emp = correlation_empirical(field->spectrum(), field->delta_k(), field->n_modes(), r,
                                                   config.stats.correlation_seeds, corr_seed);
            s << format_double(r) << ',' << format_double(exact) << ',' << format_double(emp.value) << ','
              << format_double(emp.std_error) << '\n';
        }
    }));
    const double bound = truncation_error_bound(field->spectrum(), field->delta_k(), field->n_modes());
    json results{{"spectrum", p.spectrum},
                 {"delta_k", field->delta_k()},
                 {"n_modes", field->n_modes()},
                 {"truncation_bound", bound}};
    out.write("summary.json", results.dump(2) + "\n");
    json seeds = base_seeds(config);
    seeds["field"] = field_seed(config, 0);
    seeds["correlation"] = corr_seed;
    return out.finalize(results, seeds, clock.seconds());
}

json cmd_run_ipm(const RunConfig& config, const fs::path& out_root)
{
    const Stopwatch clock;
    const FlowModel flow = build_flow(config, 0);
    const DomainSpec domain = build_domain(config, flow);
    const IpmResult r = run_ipm(flow, build_dual(config), build_kpp(config), build_ipm(config), domain);
    OutputSet out(out_root, "run-ipm", config);
    out.write("mu_trace.csv", to_text([&](std::ostream& s) { write_mu_trace_csv(s, r.trace); }));
    out.write("generation_mu.csv", to_text([&](std::ostream& s) { write_generation_mu_csv(s, r.trace); }));
    out.write("snapshot.csv", to_text([&](std::ostream& s) {
        if (config.stats.project_snapshot) {
            write_ensemble_csv(s, r.final_ensemble, std::span<const double>(domain.period));
        } else {
            write_ensemble_csv(s, r.final_ensemble);
        }
    }));
    const json results{{"mu", r.trace.final_mu()},
                       {"mu_tail_mean", r.trace.tail_mean(config.ipm.tail_generations)}};
    json seeds = base_seeds(config);
    if (config.flow.perturbation) {
        seeds["field"] = field_seed(config, 0);
    }
    return out.finalize(results, seeds, clock.seconds());
}

json cmd_front_speed(const RunConfig& config, const fs::path& out_root)
{
    const Stopwatch clock;
    std::vector<double> deltas = config.sweep.deltas;
    if (deltas.empty()) {
        deltas.push_back(config.flow.delta);
    }
    std::vector<FlowModel> realizations;
    json field_seeds = json::array();
    for (int s = 0; s < config.sweep.n_realizations; ++s) {
        realizations.push_back(build_flow(config, static_cast<std::uint64_t>(s)));
        if (config.flow.perturbation) {
            field_seeds.push_back(field_seed(config, static_cast<std::uint64_t>(s)));
        }
    }
    const FrontSpeedQuery query = build_query(config);
    const EstimatorConfig est = build_estimator_config(config, realizations.front());
    const auto rows = sweep_amplitude(deltas, query, realizations, build_kpp(config), est);

    std::optional<SlopeFit> fit;
    std::vector<double> fit_d;
    std::vector<double> fit_c;
    for (const auto& row : rows) {
        if (row.delta > 0.0 && row.c_star_mean > 0.0) {
            fit_d.push_back(row.delta);
            fit_c.push_back(row.c_star_mean);
        }
    }
    if (fit_d.size() >= 2 && *std::min_element(fit_d.begin(), fit_d.end()) <
                                 *std::max_element(fit_d.begin(), fit_d.end())) {
        fit = fit_loglog_slope(fit_d, fit_c);
    }

    OutputSet out(out_root, "front-speed", config);
    out.write("samples.csv", to_text([&](std::ostream& s) { write_samples_csv(s, rows, config.flow.dim); }));
    out.write("summary.csv", to_text([&](std::ostream& s) { write_summary_csv(s, rows, fit); }));
    json table = json::array();
    for (const auto& row : rows) {
        table.push_back({{"delta", row.delta}, {"c_star_mean", row.c_star_mean}, {"c_star_stderr", row.c_star_stderr}});
    }
    json results{{"rows", table}};
    if (fit) {
        results["slope"] = fit->slope;
        results["intercept"] = fit->intercept;
        results["slope_stderr"] = std::isnan(fit->stderr_slope) ? json(nullptr) : json(fit->stderr_slope);
    }
    json seeds = base_seeds(config);
    seeds["field"] = field_seeds;
    return out.finalize(results, seeds, clock.seconds());
}

json cmd_reference2d(const RunConfig& config, const fs::path& out_root)
{
    const Stopwatch clock;
    if (config.flow.dim != 2) {
        throw ConfigError("flow.dim: reference-2d requires a two-dimensional flow");
    }
    const FlowModel flow = build_flow(config, 0);
    const DualVariable dual = build_dual(config);
    const KppParams kpp = build_kpp(config);
    const std::vector<double> p = config.domain.period.empty() ? flow.natural_period() : config.domain.period;
    const std::array<double, 2> period{p[0], p[1]};
    const EstimatorSettings& e = config.estimator;

    OutputSet out(out_root, "reference-2d", config);
    json results = json::object();
    std::ostringstream table;
    table << "method,mu\n";
    for (const std::string& method : config.reference.methods) {
        double mu = 0.0;
        if (method == "sl_cn") {
            const auto r = run_mu_sl(EulerianGrid::uniform({e.sl_nodes, e.sl_nodes}, period), flow, dual, kpp,
                                     e.sl_dt, e.sl_steps, e.sl_burn_in);
            mu = r.mu;
            out.write("sl_log_increments.csv",
                      to_text([&](std::ostream& s) { write_log_increments_csv(s, r.log_increments, e.sl_dt); }));
        } else {
            const auto minimal = flow.minimal_period();
            const std::array<int, 2> n{minimal[0] == 0.0 ? 1 : e.spectral_nodes,
                                       minimal[1] == 0.0 ? 1 : e.spectral_nodes};
            SpectralOptions opts;
            opts.max_size = e.spectral_max_size;
            const auto r = spectral_eigen(flow, dual, kpp, n, period, opts);
            mu = r.mu;
            results["spectral_residual"] = r.residual;
        }
        results[method] = mu;
        table << method << ',' << format_double(mu) << '\n';
    }
    out.write("reference.csv", table.str());
    json seeds{{"master", config.seed}};
    if (config.flow.perturbation) {
        seeds["field"] = field_seed(config, 0);
    }
    return out.finalize(results, seeds, clock.seconds());
}

json cmd_stats(const RunConfig& config, const fs::path& out_root)
{
    const Stopwatch clock;
    const FlowModel flow = build_flow(config, 0);
    const DomainSpec domain = build_domain(config, flow);
    const IpmParams ipm = build_ipm(config);
    MomentSeries series;
    const IpmResult r = run_ipm(flow, build_dual(config), build_kpp(config), ipm, domain,
                                [&](int generation, const ParticleEnsemble& ens) {
                                    series.append(generation * ipm.generation_time(), ens);
                                });
    OutputSet out(out_root, "stats", config);
    out.write("moments.csv", to_text([&](std::ostream& s) { write_moments_csv(s, series); }));
    out.write("mu_trace.csv", to_text([&](std::ostream& s) { write_mu_trace_csv(s, r.trace); }));

    static constexpr const char* axes[] = {"x", "y", "z"};
    const ParticleEnsemble& fin = r.final_ensemble;
    json exponents = json::object();
    for (int a = 0; a < fin.dim; ++a) {
        double lo = 0.0;
        double hi = domain.period[static_cast<std::size_t>(a)];
        if (domain.kind == DomainKind::unbounded) {
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
            for (std::size_t l = 0; l < fin.size(); ++l) {
                lo = std::min(lo, fin.particle(l)[static_cast<std::size_t>(a)]);
                hi = std::max(hi, fin.particle(l)[static_cast<std::size_t>(a)]);
            }
            if (!(hi > lo)) {
                hi = lo + 1.0;
            }
        }
        const Histogram h = histogram(fin, a, config.stats.histogram_bins, lo, hi);
        out.write(std::string("histogram_") + axes[a] + ".csv",
                  to_text([&](std::ostream& s) { write_histogram_csv(s, h); }));
        if (series.size() >= 4) {
            try {
                const ExponentFit fitted = diffusion_exponent(series, a, config.stats.tail_fraction);
                exponents[axes[a]] = {{"exponent", fitted.exponent},
                                      {"stderr", std::isnan(fitted.stderr_exponent)
                                                     ? json(nullptr)
                                                     : json(fitted.stderr_exponent)},
                                      {"n_points", fitted.n_points}};
            } catch (const ContractError& err) {
                exponents[axes[a]] = {{"error", err.what()}};
            }
        }
    }
    out.write("snapshot.csv", to_text([&](std::ostream& s) {
        if (config.stats.project_snapshot) {
            write_ensemble_csv(s, fin, std::span<const double>(domain.period));
        } else {
            write_ensemble_csv(s, fin);
        }
    }));
    const json results{{"mu", r.trace.final_mu()}, {"diffusion_exponents", exponents}};
    out.write("exponents.json", exponents.dump(2) + "\n");
    json seeds = base_seeds(config);
    if (config.flow.perturbation) {
        seeds["field"] = field_seed(config, 0);
    }
    return out.finalize(results, seeds, clock.seconds());
}

} // namespace kppfl::cli
