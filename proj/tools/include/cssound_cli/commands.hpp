// SPDX-License-Identifier: Apache-2.0
//
// cssound - compressed-sensing channel sounding for WLAN MU-MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CSSOUND_CLI_COMMANDS_HPP
#define CSSOUND_CLI_COMMANDS_HPP

#include "cssound_cli/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace cssound::cli {

enum ExitCode : int
{
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_solver = 3,
};

nlohmann::json config_to_json(const Config& cfg);
nlohmann::json result_to_json(const Config& cfg, const ExperimentResult& r);
nlohmann::json overhead_to_json(const OverheadInputs& in, const OverheadReport& report);

/// Columns: domain, index, re_true, im_true, re_rec, im_rec.
void write_channel_csv(std::ostream& out, const ExperimentResult& r);
/// Columns: n_kappa, trial, mse, iterations, mac_count, converged.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Parses "a,b,c"; throws ConfigError on anything else.
std::vector<std::size_t> parse_size_list(const std::string& text);

int cmd_simulate(const Config& cfg, std::ostream& log);
int cmd_sweep(const Config& cfg, const std::vector<std::size_t>& n_kappa_list, std::ostream& log);
int cmd_overhead(const OverheadInputs& in, const std::filesystem::path& out_dir, std::ostream& log);
/// Fast invariant checks; `corrupt_p` flips one P-matrix entry to prove the checks can fail.
int cmd_selfcheck(bool corrupt_p, std::ostream& log);

} // namespace cssound::cli

#endif // CSSOUND_CLI_COMMANDS_HPP
