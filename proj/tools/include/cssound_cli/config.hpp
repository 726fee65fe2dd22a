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

#ifndef CSSOUND_CLI_CONFIG_HPP
#define CSSOUND_CLI_CONFIG_HPP

#include "cssound/pipeline.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace cssound::cli {

/// Any problem with the configuration; maps to exit code 2.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Config
{
    Experiment experiment;
    std::string pdp_source = "default"; ///< "default", a file path, or "inline"
    std::filesystem::path output_dir = ".";
};

/// Reads a YAML (or JSON) experiment file. Unknown keys are rejected. Relative
/// PDP paths resolve against the config file's directory.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Reads {sample_period_ns, taps: [{delay_ns, power_db}, ...]}.
PdpSpec load_pdp(const std::filesystem::path& path);

} // namespace cssound::cli

#endif // CSSOUND_CLI_CONFIG_HPP
