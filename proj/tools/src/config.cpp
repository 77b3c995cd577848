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

#include "kppfl_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "kppfl/error.hpp"
#include "kppfl/rng.hpp"
#include "kppfl/spectrum.hpp"

namespace kppfl::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError(path + ": " + what);
}

void check(bool ok, const std::string& path, const std::string& what)
{
    if (!ok) {
        fail(path, what);
    }
}

// Reads the keys of one JSON object and rejects any that were not consumed.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path))
    {
        check(doc_.is_object(), path_, "expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            check(v->is_number(), key_path(key), "expected a number");
            out = v->get<double>();
            check(std::isfinite(out), key_path(key), "must be finite");
        }
    }

    void get(const std::string& key, int& out)
    {
        if (const json* v = find(key)) {
            check(v->is_number_integer(), key_path(key), "expected an integer");
            const auto wide = v->get<long long>();
            check(wide >= std::numeric_limits<int>::min() && wide <= std::numeric_limits<int>::max(),
                  key_path(key), "integer out of range");
            out = static_cast<int>(wide);
        }
    }

    void get(const std::string& key, std::uint64_t& out)
    {
        if (const json* v = find(key)) {
            check(v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0),
                  key_path(key), "expected a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void get(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            check(v->is_boolean(), key_path(key), "expected a boolean");
            out = v->get<bool>();
        }
    }

    void get(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            check(v->is_string(), key_path(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void get(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = find(key)) {
            check(v->is_array(), key_path(key), "expected an array of numbers");
            out.clear();
            for (const json& x : *v) {
                check(x.is_number(), key_path(key), "expected an array of numbers");
                out.push_back(x.get<double>());
                check(std::isfinite(out.back()), key_path(key), "values must be finite");
            }
        }
    }

    void get(const std::string& key, std::vector<std::string>& out)
    {
        if (const json* v = find(key)) {
            check(v->is_array(), key_path(key), "expected an array of strings");
            out.clear();
            for (const json& x : *v) {
                check(x.is_string(), key_path(key), "expected an array of strings");
                out.push_back(x.get<std::string>());
            }
        }
    }

    template <typename Fn>
    void section(const std::string& key, Fn&& fn)
    {
        if (const json* v = find(key)) {
            Section sub(*v, key_path(key));
            fn(sub);
            sub.finish();
        }
    }

    void finish() const
    {
        for (auto it = doc_.begin(); it != doc_.end(); ++it) {
            if (seen_.count(it.key()) == 0) {
                fail(key_path(it.key()), "unknown key");
            }
        }
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

bool one_of(const std::string& value, std::initializer_list<const char*> options)
{
    for (const char* o : options) {
        if (value == o) {
            return true;
        }
    }
    return false;
}

bool nonzero_vector(const std::vector<double>& v)
{
    double n2 = 0.0;
    for (double x : v) {
        n2 += x * x;
    }
    return n2 > 0.0;
}

void validate(const RunConfig& c)
{
    const FlowConfig& f = c.flow;
    check(f.dim == 2 || f.dim == 3, "flow.dim", "must be 2 or 3");
    check(one_of(f.base, {"zero", "cellular2d", "shear2d_zero_base", "abc3d", "cellular3d"}), "flow.base",
          "unknown base flow '" + f.base + "'");
    const bool three_d = f.base == "abc3d" || f.base == "cellular3d";
    const bool two_d = f.base == "cellular2d" || f.base == "shear2d_zero_base";
    check(!(three_d && f.dim != 3) && !(two_d && f.dim != 2), "flow.base", "does not match flow.dim");
    check(f.delta >= 0.0, "flow.delta", "must be nonnegative");
    if (f.perturbation) {
        const PerturbationConfig& p = *f.perturbation;
        const auto names = SpectralDensity::preset_names();
        check(std::find(names.begin(), names.end(), p.spectrum) != names.end(),
              "flow.perturbation.spectrum", "unknown spectrum '" + p.spectrum + "'");
        check(p.delta_k >= 0.0, "flow.perturbation.delta_k", "must be nonnegative (0 selects 1/(20 pi))");
        check(p.n_modes >= 0 && p.n_modes <= kDefaultMaxModes, "flow.perturbation.n_modes",
              "must lie in [0, 2^22]");
        check(p.component >= 1 && p.component < f.dim, "flow.perturbation.component",
              "must lie in [1, dim)");
    }

    check(c.dual.lambda >= 0.0, "dual.lambda", "must be nonnegative");
    check(static_cast<int>(c.dual.e.size()) == f.dim, "dual.e", "needs one component per dimension");
    check(nonzero_vector(c.dual.e), "dual.e", "must be nonzero");

    check(c.kpp.kappa > 0.0, "kpp.kappa", "must be positive");

    const IpmConfig& i = c.ipm;
    check(i.n_particles >= 2, "ipm.n_particles", "must be at least 2");
    check(i.n_generations >= 1, "ipm.n_generations", "must be at least 1");
    check(i.n_mutations >= 1, "ipm.n_mutations", "must be at least 1");
    check(i.dt > 0.0, "ipm.dt", "must be positive");
    check(one_of(i.init, {"uniform_on_cell", "gaussian"}), "ipm.init", "must be uniform_on_cell or gaussian");
    check(i.tail_generations >= 1 && i.tail_generations <= i.n_generations, "ipm.tail_generations",
          "must lie in [1, n_generations]");

    check(one_of(c.domain.kind, {"torus", "unbounded"}), "domain.kind", "must be torus or unbounded");
    check(c.domain.period.empty() || static_cast<int>(c.domain.period.size()) == f.dim, "domain.period",
          "needs one value per dimension");
    for (double p : c.domain.period) {
        check(p > 0.0, "domain.period", "values must be positive");
    }
    check(!(i.dynamic_shift && c.domain.kind == "torus"), "ipm.dynamic_shift",
          "requires an unbounded domain");

    const EstimatorSettings& e = c.estimator;
    check(one_of(e.kind, {"ipm", "sl_cn", "spectral"}), "estimator.kind", "must be ipm, sl_cn or spectral");
    check(e.sl_nodes >= 4, "estimator.sl_nodes", "must be at least 4");
    check(e.sl_dt > 0.0, "estimator.sl_dt", "must be positive");
    check(e.sl_burn_in >= 0.0 && e.sl_burn_in < 1.0, "estimator.sl_burn_in", "must lie in [0, 1)");
    check(e.sl_steps - static_cast<int>(std::floor(e.sl_steps * e.sl_burn_in)) >= 10, "estimator.sl_steps",
          "averaging window needs at least 10 steps");
    check(e.spectral_nodes >= 2, "estimator.spectral_nodes", "must be at least 2");
    check(e.spectral_max_size >= 1, "estimator.spectral_max_size", "must be positive");

    const FrontSpeedConfig& q = c.front_speed;
    check(static_cast<int>(q.z.size()) == f.dim, "front_speed.z", "needs one component per dimension");
    check(nonzero_vector(q.z), "front_speed.z", "must be nonzero");
    check(!q.lambda_grid.empty(), "front_speed.lambda_grid", "must be nonempty");
    for (double l : q.lambda_grid) {
        check(l > 0.0, "front_speed.lambda_grid", "values must be positive");
    }
    check(one_of(q.e_search, {"fixed_to_z", "local_cone", "global_grid"}), "front_speed.e_search",
          "must be fixed_to_z, local_cone or global_grid");
    check(q.half_angle_deg > 0.0 && q.half_angle_deg < 90.0, "front_speed.half_angle_deg",
          "must lie in (0, 90)");
    check(q.n_samples >= 1, "front_speed.n_samples", "must be positive");

    for (double d : c.sweep.deltas) {
        check(d >= 0.0, "sweep.deltas", "values must be nonnegative");
    }
    check(c.sweep.n_realizations >= 1, "sweep.n_realizations", "must be positive");

    check(c.stats.histogram_bins >= 1, "stats.histogram_bins", "must be positive");
    check(c.stats.tail_fraction > 0.0 && c.stats.tail_fraction <= 1.0, "stats.tail_fraction",
          "must lie in (0, 1]");
    check(c.stats.correlation_seeds >= 2, "stats.correlation_seeds", "must be at least 2");
    for (double r : c.stats.correlation_r) {
        check(r >= 0.0, "stats.correlation_r", "values must be nonnegative");
    }

    check(!c.reference.methods.empty(), "reference.methods", "must be nonempty");
    for (const auto& m : c.reference.methods) {
        check(one_of(m, {"sl_cn", "spectral"}), "reference.methods", "unknown method '" + m + "'");
    }
    check(!c.output_dir.empty(), "output_dir", "must be nonempty");
}

} // namespace

RunConfig parse_config(const nlohmann::json& doc)
{
    RunConfig c;
    Section root(doc, "");
    root.get("seed", c.seed);
    root.get("output_dir", c.output_dir);
    root.section("flow", [&](Section& s) {
        s.get("dim", c.flow.dim);
        s.get("base", c.flow.base);
        s.get("delta", c.flow.delta);
        s.section("perturbation", [&](Section& p) {
            PerturbationConfig pc;
            p.get("spectrum", pc.spectrum);
            p.get("delta_k", pc.delta_k);
            p.get("n_modes", pc.n_modes);
            p.get("epsilon", pc.epsilon);
            p.get("component", pc.component);
            p.get("realization", pc.realization);
            c.flow.perturbation = pc;
        });
    });
    // Dimension-dependent defaults follow flow.dim unless given explicitly.
    if (c.flow.dim == 3) {
        c.dual.e = {1.0, 0.0, 0.0};
        c.front_speed.z = {1.0, 0.0, 0.0};
    }
    root.section("dual", [&](Section& s) {
        s.get("lambda", c.dual.lambda);
        s.get("e", c.dual.e);
    });
    root.section("kpp", [&](Section& s) {
        s.get("kappa", c.kpp.kappa);
        s.get("f_prime0", c.kpp.f_prime0);
    });
    root.section("ipm", [&](Section& s) {
        s.get("n_particles", c.ipm.n_particles);
        s.get("n_generations", c.ipm.n_generations);
        s.get("n_mutations", c.ipm.n_mutations);
        s.get("dt", c.ipm.dt);
        s.get("dynamic_shift", c.ipm.dynamic_shift);
        s.get("init", c.ipm.init);
        s.get("tail_generations", c.ipm.tail_generations);
    });
    root.section("domain", [&](Section& s) {
        s.get("kind", c.domain.kind);
        s.get("period", c.domain.period);
    });
    root.section("estimator", [&](Section& s) {
        s.get("kind", c.estimator.kind);
        s.get("sl_nodes", c.estimator.sl_nodes);
        s.get("sl_dt", c.estimator.sl_dt);
        s.get("sl_steps", c.estimator.sl_steps);
        s.get("sl_burn_in", c.estimator.sl_burn_in);
        s.get("spectral_nodes", c.estimator.spectral_nodes);
        s.get("spectral_max_size", c.estimator.spectral_max_size);
    });
    root.section("front_speed", [&](Section& s) {
        s.get("z", c.front_speed.z);
        s.get("lambda_grid", c.front_speed.lambda_grid);
        s.get("refine", c.front_speed.refine);
        s.get("e_search", c.front_speed.e_search);
        s.get("half_angle_deg", c.front_speed.half_angle_deg);
        s.get("n_samples", c.front_speed.n_samples);
    });
    root.section("sweep", [&](Section& s) {
        s.get("deltas", c.sweep.deltas);
        s.get("n_realizations", c.sweep.n_realizations);
    });
    root.section("stats", [&](Section& s) {
        s.get("histogram_bins", c.stats.histogram_bins);
        s.get("tail_fraction", c.stats.tail_fraction);
        s.get("correlation_seeds", c.stats.correlation_seeds);
        s.get("correlation_r", c.stats.correlation_r);
        s.get("project_snapshot", c.stats.project_snapshot);
    });
    root.section("reference", [&](Section& s) { s.get("methods", c.reference.methods); });
    root.finish();
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

nlohmann::json serialize_config(const RunConfig& c)
{
    json flow{{"dim", c.flow.dim}, {"base", c.flow.base}, {"delta", c.flow.delta}};
    if (c.flow.perturbation) {
        const PerturbationConfig& p = *c.flow.perturbation;
        flow["perturbation"] = {{"spectrum", p.spectrum},   {"delta_k", p.delta_k},
                                {"n_modes", p.n_modes},     {"epsilon", p.epsilon},
                                {"component", p.component}, {"realization", p.realization}};
    }
    return {
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"flow", flow},
        {"dual", {{"lambda", c.dual.lambda}, {"e", c.dual.e}}},
        {"kpp", {{"kappa", c.kpp.kappa}, {"f_prime0", c.kpp.f_prime0}}},
        {"ipm",
         {{"n_particles", c.ipm.n_particles},
          {"n_generations", c.ipm.n_generations},
          {"n_mutations", c.ipm.n_mutations},
          {"dt", c.ipm.dt},
          {"dynamic_shift", c.ipm.dynamic_shift},
          {"init", c.ipm.init},
          {"tail_generations", c.ipm.tail_generations}}},
        {"domain", {{"kind", c.domain.kind}, {"period", c.domain.period}}},
        {"estimator",
         {{"kind", c.estimator.kind},
          {"sl_nodes", c.estimator.sl_nodes},
          {"sl_dt", c.estimator.sl_dt},
          {"sl_steps", c.estimator.sl_steps},
          {"sl_burn_in", c.estimator.sl_burn_in},
          {"spectral_nodes", c.estimator.spectral_nodes},
          {"spectral_max_size", c.estimator.spectral_max_size}}},
        {"front_speed",
         {{"z", c.front_speed.z},
          {"lambda_grid", c.front_speed.lambda_grid},
          {"refine", c.front_speed.refine},
          {"e_search", c.front_speed.e_search},
          {"half_angle_deg", c.front_speed.half_angle_deg},
          {"n_samples", c.front_speed.n_samples}}},
        {"sweep", {{"deltas", c.sweep.deltas}, {"n_realizations", c.sweep.n_realizations}}},
        {"stats",
         {{"histogram_bins", c.stats.histogram_bins},
          {"tail_fraction", c.stats.tail_fraction},
          {"correlation_seeds", c.stats.correlation_seeds},
          {"correlation_r", c.stats.correlation_r},
          {"project_snapshot", c.stats.project_snapshot}}},
        {"reference", {{"methods", c.reference.methods}}},
    };
}

std::string config_hash(const RunConfig& config)
{
    const std::string text = serialize_config(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t ipm_seed(const RunConfig& config) { return rng::derive_seed(config.seed, "ipm"); }

std::uint64_t field_seed(const RunConfig& config, std::uint64_t realization_index)
{
    const std::uint64_t base = config.flow.perturbation ? config.flow.perturbation->realization : 0;
    return rng::derive_seed(config.seed, "field", base + realization_index);
}

std::shared_ptr<const FieldRealization> build_realization(const RunConfig& config,
                                                          std::uint64_t realization_index)
{
    if (!config.flow.perturbation) {
        return nullptr;
    }
    const PerturbationConfig& p = *config.flow.perturbation;
    const double dk = p.delta_k > 0.0 ? p.delta_k : 1.0 / (20.0 * std::numbers::pi);
    return std::make_shared<const FieldRealization>(sample_realization(
        SpectralDensity::preset(p.spectrum), dk, p.n_modes, field_seed(config, realization_index)));
}

FlowModel build_flow(const RunConfig& config, std::uint64_t realization_index)
{
    const auto& f = config.flow;
    auto field = build_realization(config, realization_index);
    const double epsilon = f.perturbation ? f.perturbation->epsilon : 0.0;
    const int component = f.perturbation ? f.perturbation->component : 1;
    return {f.dim, base_flow_from_string(f.base), f.delta, epsilon, std::move(field), component};
}

DualVariable build_dual(const RunConfig& config)
{
    return DualVariable::along(config.dual.lambda, config.dual.e);
}

KppParams build_kpp(const RunConfig& config) { return {config.kpp.kappa, config.kpp.f_prime0}; }

IpmParams build_ipm(const RunConfig& config)
{
    IpmParams p;
    p.n_particles = config.ipm.n_particles;
    p.n_generations = config.ipm.n_generations;
    p.n_mutations = config.ipm.n_mutations;
    p.dt = config.ipm.dt;
    p.seed = ipm_seed(config);
    p.dynamic_shift = config.ipm.dynamic_shift;
    p.init = config.ipm.init == "gaussian" ? InitialMeasure::gaussian : InitialMeasure::uniform_on_cell;
    return p;
}

DomainSpec build_domain(const RunConfig& config, const FlowModel& flow)
{
    std::vector<double> period = config.domain.period.empty() ? flow.natural_period() : config.domain.period;
    return config.domain.kind == "torus" ? DomainSpec::torus(std::move(period))
                                         : DomainSpec::unbounded(std::move(period));
}

EstimatorConfig build_estimator_config(const RunConfig& config, const FlowModel& flow)
{
    EstimatorConfig e;
    e.ipm = build_ipm(config);
    e.ipm_tail_generations = config.ipm.tail_generations;
    e.domain = build_domain(config, flow);
    e.sl_nodes = config.estimator.sl_nodes;
    e.sl_dt = config.estimator.sl_dt;
    e.sl_steps = config.estimator.sl_steps;
    e.sl_burn_in = config.estimator.sl_burn_in;
    e.spectral_nodes = config.estimator.spectral_nodes;
    e.spectral.max_size = config.estimator.spectral_max_size;
    return e;
}

FrontSpeedQuery build_query(const RunConfig& config)
{
    const FrontSpeedConfig& f = config.front_speed;
    FrontSpeedQuery q;
    q.z = f.z;
    q.lambda_grid = f.lambda_grid;
    q.refine = f.refine;
    if (f.e_search == "local_cone") {
        q.e_search = ESearch::cone(f.half_angle_deg, f.n_samples);
    } else if (f.e_search == "global_grid") {
        q.e_search = ESearch::global(f.n_samples);
    } else {
        q.e_search = ESearch::fixed();
    }
    q.e_search.half_angle_deg = f.half_angle_deg;
    q.e_search.n_samples = f.n_samples;
    q.estimator = estimator_from_string(config.estimator.kind);
    return q;
}

} // namespace kppfl::cli
