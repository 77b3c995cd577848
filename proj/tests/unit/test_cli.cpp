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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "kppfl/error.hpp"
#include "kppfl/parallel.hpp"
#include "kppfl_cli/commands.hpp"
#include "kppfl_cli/config.hpp"

using namespace kppfl;
using namespace kppfl::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ScratchDir {
public:
    ScratchDir()
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("kppfl-test-") + info->test_suite_name() + "-" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() { fs::remove_all(path_); }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const fs::path& path() const noexcept { return path_; }

    fs::path write_config(const json& doc, const std::string& name = "config.json") const
    {
        const fs::path p = path_ / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

private:
    fs::path path_;
};

int invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "kppfl");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Random configuration that satisfies every validation rule.
RunConfig random_config(std::mt19937_64& g)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto pick = [&](std::initializer_list<const char*> xs) {
        return std::string(xs.begin()[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(g)]);
    };
    RunConfig c;
    c.seed = g();
    c.flow.dim = u(g) < 0.5 ? 2 : 3;
    c.flow.base = c.flow.dim == 2 ? pick({"zero", "cellular2d", "shear2d_zero_base"})
                                  : pick({"zero", "abc3d", "cellular3d"});
    c.flow.delta = 10.0 * u(g);
    if (u(g) < 0.5) {
        PerturbationConfig p;
        p.spectrum = pick({"k05exp", "zero"});
        p.delta_k = u(g) < 0.5 ? 0.0 : u(g);
        p.n_modes = static_cast<int>(1000 * u(g));
        p.epsilon = u(g);
        p.component = 1 + static_cast<int>((c.flow.dim - 1) * u(g) * 0.999);
        p.realization = g() % 100;
        c.flow.perturbation = p;
    }
    c.dual.lambda = 2.0 * u(g);
    c.dual.e.assign(c.flow.dim, 0.0);
    c.dual.e[0] = 0.5 + u(g);
    c.dual.e[1] = u(g) - 0.5;
    c.kpp.kappa = 0.01 + u(g);
    c.kpp.f_prime0 = 3.0 * u(g);
    c.ipm.n_particles = 2 + static_cast<int>(1e5 * u(g));
    c.ipm.n_generations = 1 + static_cast<int>(200 * u(g));
    c.ipm.n_mutations = 1 + static_cast<int>(64 * u(g));
    c.ipm.dt = 1e-3 + 0.1 * u(g);
    c.ipm.init = pick({"uniform_on_cell", "gaussian"});
    c.ipm.tail_generations = 1 + static_cast<int>(c.ipm.n_generations * u(g) * 0.999);
    c.domain.kind = pick({"torus", "unbounded"});
    c.ipm.dynamic_shift = c.domain.kind == "unbounded" && u(g) < 0.5;
    if (u(g) < 0.5) {
        for (int i = 0; i < c.flow.dim; ++i) {
            c.domain.period.push_back(1.0 + 10.0 * u(g));
        }
    }
    c.estimator.kind = pick({"ipm", "sl_cn", "spectral"});
    c.estimator.sl_nodes = 4 + static_cast<int>(200 * u(g));
    c.estimator.sl_dt = 1e-4 + u(g) * 0.1;
    c.estimator.sl_steps = 100 + static_cast<int>(1000 * u(g));
    c.estimator.sl_burn_in = 0.8 * u(g);
    c.estimator.spectral_nodes = 2 + static_cast<int>(60 * u(g));
    c.estimator.spectral_max_size = 1 + static_cast<int>(10000 * u(g));
    c.front_speed.z = c.dual.e;
    c.front_speed.lambda_grid = {0.1 + u(g), 2.0 + u(g)};
    c.front_speed.refine = u(g) < 0.5;
    c.front_speed.e_search = pick({"fixed_to_z", "local_cone", "global_grid"});
    c.front_speed.half_angle_deg = 1.0 + 80.0 * u(g);
    c.front_speed.n_samples = 1 + static_cast<int>(40 * u(g));
    c.sweep.deltas = {u(g), 4.0 * u(g)};
    c.sweep.n_realizations = 1 + static_cast<int>(5 * u(g));
    c.stats.histogram_bins = 1 + static_cast<int>(100 * u(g));
    c.stats.tail_fraction = 0.01 + 0.99 * u(g);
    c.stats.correlation_seeds = 2 + static_cast<int>(500 * u(g));
    c.stats.correlation_r = {0.0, 10.0 * u(g)};
    c.stats.project_snapshot = u(g) < 0.5;
    c.reference.methods = u(g) < 0.5 ? std::vector<std::string>{"sl_cn"}
                                     : std::vector<std::string>{"sl_cn", "spectral"};
    c.output_dir = "out-" + std::to_string(g() % 1000);
    return c;
}

json tiny_ipm_config()
{
    return {{"seed", 11},
            {"flow", {{"dim", 2}, {"base", "cellular2d"}, {"delta", 2.0}}},
            {"ipm", {{"n_particles", 3000}, {"n_generations", 4}, {"n_mutations", 8}, {"dt", 0.01}}}};
}

} // namespace

TEST(Config, RoundTripOfRandomConfigs)
{
    std::mt19937_64 g(20261015);
    for (int i = 0; i < 300; ++i) {
        const RunConfig c = random_config(g);
        const json doc = serialize_config(c);
        const RunConfig back = parse_config(doc);
        ASSERT_EQ(back, c) << doc.dump();
        EXPECT_EQ(config_hash(back), config_hash(c));
        // The text form round-trips too.
        EXPECT_EQ(parse_config(json::parse(doc.dump())), c);
    }
}

TEST(Config, EmptyDocumentGivesDefaults)
{
    EXPECT_EQ(parse_config(json::object()), RunConfig{});
}

TEST(Config, ThreeDimensionalDefaultsFollowDim)
{
    const RunConfig c = parse_config({{"flow", {{"dim", 3}, {"base", "abc3d"}}}});
    EXPECT_EQ(c.dual.e, (std::vector<double>{1.0, 0.0, 0.0}));
    EXPECT_EQ(c.front_speed.z, (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(Config, UnknownKeysRejectedWithPath)
{
    try {
        parse_config({{"ipm", {{"n_particle", 10}}}});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("ipm.n_particle"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_config({{"bogus", 1}}), ConfigError);
    EXPECT_THROW(parse_config({{"ipm", {{"seed", 1}}}}), ConfigError);
}

TEST(Config, RangeAndTypeChecks)
{
    const std::vector<json> bad{
        {{"flow", {{"dim", 4}}}},
        {{"flow", {{"dim", 3}}}},  // cellular2d in 3D
        {{"flow", {{"delta", -1.0}}}},
        {{"flow", {{"perturbation", {{"spectrum", "nope"}}}}}},
        {{"flow", {{"perturbation", {{"component", 2}}}}}},
        {{"dual", {{"lambda", -0.5}}}},
        {{"dual", {{"e", {0.0, 0.0}}}}},
        {{"dual", {{"e", {1.0}}}}},
        {{"kpp", {{"kappa", 0.0}}}},
        {{"ipm", {{"n_particles", 1}}}},
        {{"ipm", {{"dt", 0.0}}}},
        {{"ipm", {{"tail_generations", 65}}}},
        {{"ipm", {{"dynamic_shift", true}}}},  // on the default torus
        {{"ipm", {{"n_particles", "many"}}}},
        {{"domain", {{"period", {1.0, -1.0}}}}},
        {{"estimator", {{"sl_burn_in", 1.0}}}},
        {{"front_speed", {{"lambda_grid", json::array()}}}},
        {{"front_speed", {{"half_angle_deg", 90.0}}}},
        {{"stats", {{"tail_fraction", 0.0}}}},
        {{"reference", {{"methods", {"fem"}}}}},
        {{"output_dir", ""}},
    };
    for (const auto& doc : bad) {
        EXPECT_THROW(parse_config(doc), ConfigError) << doc.dump();
    }
}

TEST(Cli, ExitCodes)
{
    const ScratchDir dir;
    EXPECT_EQ(invoke({"run-ipm", "--config", (dir.path() / "missing.json").string()}), 2);
    EXPECT_EQ(invoke({"run-ipm", "--config", dir.write_config({{"ipm", {{"dt", -1}}}}).string()}), 2);
    EXPECT_EQ(invoke({"no-such-command"}), 2);
    EXPECT_EQ(invoke({"run-ipm"}), 2);
    // A regular file where the output directory should go is a runtime failure.
    const fs::path blocker = dir.path() / "blocker";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(invoke({"run-ipm", "--config", dir.write_config(tiny_ipm_config()).string(), "--out", blocker.string()}),
              3);
}

TEST(Cli, ManifestChecksumsIndependentOfThreads)
{
    const ScratchDir dir;
    const fs::path cfg = dir.write_config(tiny_ipm_config());
    ASSERT_EQ(invoke({"run-ipm", "--config", cfg.string(), "--out", (dir.path() / "t1").string(), "--threads", "1"}),
              0);
    ASSERT_EQ(invoke({"run-ipm", "--config", cfg.string(), "--out", (dir.path() / "t8").string(), "--threads", "8"}),
              0);
    const std::string sub = "run-ipm-" + config_hash(parse_config(tiny_ipm_config()));
    const json m1 = json::parse(slurp(dir.path() / "t1" / sub / "manifest.json"));
    const json m8 = json::parse(slurp(dir.path() / "t8" / sub / "manifest.json"));
    EXPECT_EQ(m1.at("outputs"), m8.at("outputs"));
    EXPECT_EQ(m1.at("results"), m8.at("results"));
    EXPECT_EQ(m1.at("config_hash"), m8.at("config_hash"));
    for (const auto& [name, sum] : m1.at("outputs").items()) {
        EXPECT_EQ(fnv1a_hex(slurp(dir.path() / "t1" / sub / name)), sum.get<std::string>()) << name;
    }
    set_worker_threads(0);
}

TEST(Cli, SeedOverrideChangesOutput)
{
    const ScratchDir dir;
    const fs::path cfg = dir.write_config(tiny_ipm_config());
    ASSERT_EQ(invoke({"run-ipm", "--config", cfg.string(), "--out", dir.path().string(), "--seed", "12"}), 0);
    RunConfig c = parse_config(tiny_ipm_config());
    c.seed = 12;
    EXPECT_TRUE(fs::exists(dir.path() / ("run-ipm-" + config_hash(c)) / "manifest.json"));
}

TEST(GenField, ByteIdenticalReruns)
{
    const ScratchDir dir;
    json doc{{"seed", 5},
             {"flow", {{"perturbation", {{"n_modes", 64}}}}},
             {"stats", {{"correlation_seeds", 20}, {"correlation_r", {0.0, 1.0}}}}};
    const RunConfig c = parse_config(doc);
    const json a = cmd_gen_field(c, dir.path() / "a");
    const json b = cmd_gen_field(c, dir.path() / "b");
    EXPECT_EQ(a.at("outputs"), b.at("outputs"));
    const std::string sub = "gen-field-" + config_hash(c);
    for (const char* name : {"field.json", "coefficients.csv", "correlation.csv", "summary.json"}) {
        EXPECT_EQ(slurp(dir.path() / "a" / sub / name), slurp(dir.path() / "b" / sub / name)) << name;
    }
}

TEST(GenField, ZeroSpectrumGivesZeroMagnitudes)
{
    const ScratchDir dir;
    const RunConfig c = parse_config(
        {{"flow", {{"perturbation", {{"spectrum", "zero"}, {"n_modes", 16}}}}},
         {"stats", {{"correlation_seeds", 4}}}});
    cmd_gen_field(c, dir.path());
    std::istringstream in(slurp(dir.path() / ("gen-field-" + config_hash(c)) / "coefficients.csv"));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
        ++rows;
    }
    EXPECT_EQ(rows, 17);
}

TEST(GenField, RequiresPerturbation)
{
    const ScratchDir dir;
    EXPECT_THROW(cmd_gen_field(RunConfig{}, dir.path()), ConfigError);
}
