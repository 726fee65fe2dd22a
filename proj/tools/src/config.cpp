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

#include "cssound_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cssound::cli {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed)
{
    if (!node.IsMap())
        throw ConfigError(where + ": expected a mapping");
    for (const auto& kv : node)
    {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key))
        {
            std::string list;
            for (const auto& a : allowed)
                list += (list.empty() ? "" : ", ") + a;
            throw ConfigError(where + ": unknown key '" + key + "' (allowed: " + list + ")");
        }
    }
}

std::string join(const std::string& where, const std::string& key)
{
    return where.empty() ? key : where + "." + key;
}

template <typename T>
T read(const YAML::Node& node, const std::string& where, const std::string& key, T fallback)
{
    const auto v = node[key];
    if (!v)
        return fallback;
    try
    {
        return v.as<T>();
    }
    catch (const YAML::Exception&)
    {
        throw ConfigError(join(where, key) + ": cannot parse value '" + YAML::Dump(v) + "'");
    }
}

std::size_t read_count(const YAML::Node& node, const std::string& where, const std::string& key,
                       std::size_t fallback)
{
    const long long v = read<long long>(node, where, key, static_cast<long long>(fallback));
    if (v < 0)
        throw ConfigError(join(where, key) + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

/// Numbers, or the strings inf / +inf.
double read_db(const YAML::Node& node, const std::string& where, const std::string& key, double fallback)
{
    const auto v = node[key];
    if (!v)
        return fallback;
    const auto s = v.as<std::string>();
    if (s == "inf" || s == "+inf" || s == ".inf" || s == "noiseless")
        return std::numeric_limits<double>::infinity();
    return read<double>(node, where, key, fallback);
}

PdpSpec parse_pdp_node(const YAML::Node& node, const std::string& where)
{
    check_keys(node, where, {"sample_period_ns", "taps"});
    const double ts = read<double>(node, where, "sample_period_ns", 50.0);
    const auto taps = node["taps"];
    if (!taps || !taps.IsSequence() || taps.size() == 0)
        throw ConfigError(where + ".taps: expected a non-empty list of {delay_ns, power_db}");
    std::vector<PdpTap> out;
    for (std::size_t i = 0; i < taps.size(); ++i)
    {
        const std::string w = where + ".taps[" + std::to_string(i) + "]";
        check_keys(taps[i], w, {"delay_ns", "power_db"});
        if (!taps[i]["delay_ns"] || !taps[i]["power_db"])
            throw ConfigError(w + ": both delay_ns and power_db are required");
        out.push_back({read<double>(taps[i], w, "delay_ns", 0.0), read<double>(taps[i], w, "power_db", 0.0)});
    }
    try
    {
        return PdpSpec(std::move(out), ts);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(where + ": " + e.what());
    }
}

YAML::Node parse_yaml(const std::string& text, const std::string& origin)
{
    try
    {
        return YAML::Load(text);
    }
    catch (const YAML::Exception& e)
    {
        throw ConfigError(origin + ": " + e.what());
    }
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

PdpSpec load_pdp(const std::filesystem::path& path)
{
    return parse_pdp_node(parse_yaml(slurp(path), path.string()), "pdp");
}

Config load_config(const std::filesystem::path& path)
{
    return parse_config(slurp(path), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

Config parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    const YAML::Node root = parse_yaml(text, "config");
    Config cfg;
    if (!root || root.IsNull())
        return cfg;
    check_keys(root, "config",
               {"dims", "pdp", "correlation", "recovery", "sounding", "feedback", "trials", "master_seed", "output"});
    Experiment& e = cfg.experiment;

    if (const auto n = root["dims"])
    {
        check_keys(n, "dims", {"n_dft", "n_t", "n_r"});
        e.dims.n_dft = read_count(n, "dims", "n_dft", e.dims.n_dft);
        e.dims.n_t = read_count(n, "dims", "n_t", e.dims.n_t);
        e.dims.n_r = read_count(n, "dims", "n_r", e.dims.n_r);
    }

    if (const auto n = root["pdp"])
    {
        if (n.IsScalar())
        {
            const auto s = n.as<std::string>();
            if (s != "default")
            {
                const auto p = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s) : base_dir / s;
                e.pdp = load_pdp(p);
                cfg.pdp_source = s;
            }
        }
        else
        {
            e.pdp = parse_pdp_node(n, "pdp");
            cfg.pdp_source = "inline";
        }
    }

    if (const auto n = root["correlation"])
    {
        check_keys(n, "correlation", {"rho_tx", "rho_rx"});
        e.correlation.rho_tx = read<double>(n, "correlation", "rho_tx", 0.0);
        e.correlation.rho_rx = read<double>(n, "correlation", "rho_rx", 0.0);
    }

    if (const auto n = root["recovery"])
    {
        check_keys(n, "recovery", {"kappa", "tau", "i_max", "algorithm", "resolve_after_prune"});
        if (n["kappa"] && n["kappa"].as<std::string>() == "auto")
            e.kappa = 0;
        else
            e.kappa = read_count(n, "recovery", "kappa", e.kappa);
        e.tau = read<double>(n, "recovery", "tau", e.tau);
        e.i_max = read<int>(n, "recovery", "i_max", e.i_max);
        e.resolve_after_prune = read<bool>(n, "recovery", "resolve_after_prune", e.resolve_after_prune);
        if (n["algorithm"])
        {
            try
            {
                e.algorithm = parse_algorithm(n["algorithm"].as<std::string>());
            }
            catch (const std::invalid_argument& ex)
            {
                throw ConfigError(std::string("recovery.algorithm: ") + ex.what());
            }
        }
    }

    if (const auto n = root["sounding"])
    {
        check_keys(n, "sounding", {"seed", "n_kappa", "snr_db", "power_mode", "threshold_db", "usable_tones"});
        const long long seed = read<long long>(n, "sounding", "seed", e.allocation_seed);
        if (seed <= 0 || seed > 0xFFFF)
            throw ConfigError("sounding.seed: must be a nonzero 16-bit value (1..65535), got " + std::to_string(seed));
        e.allocation_seed = static_cast<std::uint16_t>(seed);
        e.n_kappa = read_count(n, "sounding", "n_kappa", e.n_kappa);
        e.snr_db = read_db(n, "sounding", "snr_db", e.snr_db);
        if (n["power_mode"])
        {
            try
            {
                e.power_mode = parse_power_mode(n["power_mode"].as<std::string>());
            }
            catch (const std::invalid_argument& ex)
            {
                throw ConfigError(std::string("sounding.power_mode: ") + ex.what());
            }
        }
        if (n["threshold_db"] && !n["threshold_db"].IsNull())
            e.threshold_db = read<double>(n, "sounding", "threshold_db", 0.0);
        if (const auto u = n["usable_tones"])
        {
            if (!u.IsSequence())
                throw ConfigError("sounding.usable_tones: expected a list of tone indices");
            e.usable_tones.assign(e.dims.n_dft, false);
            for (const auto& t : u)
            {
                const long long k = t.as<long long>();
                if (k < 0 || static_cast<std::size_t>(k) >= e.dims.n_dft)
                    throw ConfigError("sounding.usable_tones: index " + std::to_string(k) + " outside [0, dims.n_dft)");
                e.usable_tones[static_cast<std::size_t>(k)] = true;
            }
        }
    }

    if (const auto n = root["feedback"])
    {
        check_keys(n, "feedback", {"mode", "quant_bits", "n_tones", "ltf_duration_us"});
        if (n["mode"])
        {
            try
            {
                e.feedback_mode = parse_feedback_mode(n["mode"].as<std::string>());
            }
            catch (const std::invalid_argument& ex)
            {
                throw ConfigError(std::string("feedback.mode: ") + ex.what());
            }
        }
        if (n["quant_bits"] && !n["quant_bits"].IsNull() && n["quant_bits"].as<std::string>() != "ideal")
            e.quant_bits = read<int>(n, "feedback", "quant_bits", 0);
        e.feedback_tones = read_count(n, "feedback", "n_tones", e.feedback_tones);
        e.ltf_duration_us = read<double>(n, "feedback", "ltf_duration_us", e.ltf_duration_us);
    }

    e.trials = read_count(root, "", "trials", e.trials);
    e.master_seed = read<std::uint64_t>(root, "", "master_seed", e.master_seed);
    if (root["output"])
        cfg.output_dir = root["output"].as<std::string>();
    return cfg;
}

} // namespace cssound::cli
