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

#include "cssound_cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>

using namespace cssound;
using namespace cssound::cli;

namespace {

struct CommonFlags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string algorithm;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "Experiment file (YAML or JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Override master_seed");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--algorithm", f.algorithm, "Recovery algorithm")->check(CLI::IsMember({"cosamp", "omp"}));
}

Config resolve(const CommonFlags& f)
{
    Config cfg = f.config.empty() ? Config{} : load_config(f.config);
    if (f.seed)
        cfg.experiment.master_seed = *f.seed;
    if (!f.out.empty())
        cfg.output_dir = f.out;
    if (!f.algorithm.empty())
        cfg.experiment.algorithm = parse_algorithm(f.algorithm);
    cfg.experiment.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compressed-sensing channel sounding simulator"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run one experiment; writes result.json and channel.csv");
    add_common(simulate, sim_flags);

    CommonFlags sweep_flags;
    std::string nkappa_list;
    std::optional<std::size_t> sweep_trials;
    auto* sweep = app.add_subcommand("sweep", "Sweep N_kappa over seeded trials; writes sweep.csv");
    add_common(sweep, sweep_flags);
    sweep->add_option("--nkappa-list", nkappa_list, "Comma-separated N_kappa values")->required();
    sweep->add_option("--trials", sweep_trials, "Override trials");

    std::string oh_config;
    std::string oh_out;
    std::optional<std::size_t> oh_n_dft, oh_n_t, oh_n_r, oh_n_kappa, oh_n_tones;
    std::optional<double> oh_ltf;
    std::optional<int> oh_bits;
    std::string oh_mode;
    auto* overhead = app.add_subcommand("overhead", "Feedback bits and NDP airtime, conventional vs punctured");
    overhead->add_option("--config", oh_config, "Experiment file supplying defaults")->check(CLI::ExistingFile);
    overhead->add_option("--out", oh_out, "Output directory");
    overhead->add_option("--n-dft", oh_n_dft, "Transform size");
    overhead->add_option("--n-t", oh_n_t, "Transmit antennas");
    overhead->add_option("--n-r", oh_n_r, "Receive antennas (feedback columns)");
    overhead->add_option("--mode", oh_mode, "Angle quantization")->check(CLI::IsMember({"su", "mu"}));
    overhead->add_option("--n-kappa", oh_n_kappa, "Punctured measurements");
    overhead->add_option("--n-tones", oh_n_tones, "Tones reported by angle feedback");
    overhead->add_option("--ltf-us", oh_ltf, "LTF symbol duration in microseconds");
    overhead->add_option("--quant-bits", oh_bits, "Bits per real component of raw measurements");

    bool corrupt_p = false;
    auto* selfcheck = app.add_subcommand("selfcheck", "Fast invariant checks");
    selfcheck->add_flag("--debug-corrupt-p", corrupt_p, "")->group("");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*simulate)
            return cmd_simulate(resolve(sim_flags), std::cout);
        if (*sweep)
        {
            Config cfg = resolve(sweep_flags);
            if (sweep_trials)
                cfg.experiment.trials = *sweep_trials;
            return cmd_sweep(cfg, parse_size_list(nkappa_list), std::cout);
        }
        if (*overhead)
        {
            Config cfg = oh_config.empty() ? Config{} : load_config(oh_config);
            const Experiment& e = cfg.experiment;
            OverheadInputs in{e.dims, e.feedback_mode, e.n_kappa, e.feedback_tones, e.ltf_duration_us, e.quant_bits};
            if (oh_n_dft)
                in.dims.n_dft = *oh_n_dft;
            if (oh_n_t)
                in.dims.n_t = *oh_n_t;
            if (oh_n_r)
                in.dims.n_r = *oh_n_r;
            if (!oh_mode.empty())
                in.mode = parse_feedback_mode(oh_mode);
            if (oh_n_kappa)
                in.n_kappa = *oh_n_kappa;
            if (oh_n_tones)
                in.n_tones = *oh_n_tones;
            if (oh_ltf)
                in.ltf_duration_us = *oh_ltf;
            if (oh_bits)
                in.quant_bits = *oh_bits;
            if (in.dims.n_dft == 0 || in.dims.n_t == 0 || in.dims.n_r == 0)
                throw ConfigError("overhead: n_dft, n_t and n_r must be positive");
            if (in.quant_bits && (*in.quant_bits < 1 || *in.quant_bits > 32))
                throw ConfigError("--quant-bits: must lie in [1, 32]");
            return cmd_overhead(in, oh_out.empty() ? cfg.output_dir : std::filesystem::path(oh_out), std::cout);
        }
        if (*selfcheck)
            return cmd_selfcheck(corrupt_p, std::cout);
    }
    catch (const ConfigError& e)
    {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    }
    catch (const std::invalid_argument& e)
    {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_solver;
    }
    return exit_usage;
}
