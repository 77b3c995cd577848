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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kppfl_cli/config.hpp"

namespace kppfl::cli {

/// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Output directory of one command, namespaced by the config hash, plus the
/// manifest that records a checksum for every file written.
class OutputSet {
public:
    OutputSet(const std::filesystem::path& root, std::string command, const RunConfig& config);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void write(const std::string& name, const std::string& content);

    /// Writes manifest.json and returns its document.
    nlohmann::json finalize(nlohmann::json results, nlohmann::json seeds, double wall_clock_seconds);

private:
    std::filesystem::path dir_;
    std::string command_;
    RunConfig config_;
    nlohmann::json checksums_ = nlohmann::json::object();
};

nlohmann::json cmd_gen_field(const RunConfig& config, const std::filesystem::path& out_root);
nlohmann::json cmd_run_ipm(const RunConfig& config, const std::filesystem::path& out_root);
nlohmann::json cmd_front_speed(const RunConfig& config, const std::filesystem::path& out_root);
nlohmann::json cmd_reference2d(const RunConfig& config, const std::filesystem::path& out_root);
nlohmann::json cmd_stats(const RunConfig& config, const std::filesystem::path& out_root);

/// Parses arguments, runs one subcommand and maps failures to exit codes:
/// 0 success, 2 configuration error, 3 numerical or runtime error.
int run_cli(int argc, char** argv);

} // namespace kppfl::cli
