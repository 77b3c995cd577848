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

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "kppfl/error.hpp"
#include "kppfl/parallel.hpp"
#include "kppfl_cli/commands.hpp"

namespace kppfl::cli {

namespace {

struct Flags {
    std::string config;
    std::string out;
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

int threads_from_env()
{
    const char* env = std::getenv("KPPFL_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        throw ConfigError("KPPFL_THREADS must be a positive integer");
    }
    return static_cast<int>(v);
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"KPP front speeds by interacting particle methods"};
    app.require_subcommand(1);
    Flags flags;

    using Command = nlohmann::json (*)(const RunConfig&, const std::filesystem::path&);
    const std::pair<const char*, Command> commands[] = {
        {"gen-field", cmd_gen_field},     {"run-ipm", cmd_run_ipm}, {"front-speed", cmd_front_speed},
        {"reference-2d", cmd_reference2d}, {"stats", cmd_stats},
    };
    const char* descriptions[] = {
        "sample a random Fourier realization and its correlation diagnostics",
        "run the particle method for one dual variable",
        "minimize mu / (z, lambda e), optionally over an amplitude sweep",
        "Eulerian reference eigenvalues (2D only)",
        "ensemble moments, histograms and diffusion exponents",
    };
    Command selected = nullptr;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
        sub->add_option("--config", flags.config, "run configuration (JSON)")->required();
        sub->add_option("--out", flags.out, "output root directory (overrides output_dir)");
        sub->add_option("--threads", flags.threads, "worker threads; never changes results")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", flags.seed, "master seed override");
        sub->callback([&selected, cmd = commands[i].second] { selected = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config = load_config(flags.config);
        if (flags.seed) {
            config.seed = *flags.seed;
        }
        const int threads = flags.threads > 0 ? flags.threads : threads_from_env();
        if (threads > 0) {
            set_worker_threads(threads);
        }
        const std::filesystem::path root = flags.out.empty() ? config.output_dir : flags.out;
        const nlohmann::json manifest = selected(config, root);
        std::cout << manifest["results"].dump() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace kppfl::cli
