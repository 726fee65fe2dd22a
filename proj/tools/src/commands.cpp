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

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace cssound::cli {

using nlohmann::json;

namespace {

json number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    return v;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

json report_to_json(const FeedbackReport& r)
{
    json j;
    j["scheme"] = r.scheme;
    j["bits_per_tone"] = r.bits_per_tone ? json(*r.bits_per_tone) : json(nullptr);
    j["n_tones"] = r.n_tones;
    j["total_bits"] = r.total_bits;
    j["ltf_symbols"] = r.ltf_symbols;
    j["airtime_us"] = number(r.airtime_us);
    return j;
}

json recovery_to_json(const SparseRecoveryResult& r)
{
    json j;
    j["status"] = std::string(to_string(r.status));
    j["converged"] = r.converged();
    j["iterations"] = r.iterations;
    j["mac_count"] = r.mac_count;
    j["degenerate_retries"] = r.degenerate_retries;
    j["support"] = r.support;
    json hist = json::array();
    for (double v : r.residual_history)
        hist.push_back(number(v));
    j["residual_history"] = hist;
    return j;
}

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    ComplexMatrix m(rows, cols);
    for (auto& v : m.data())
    {
        const double re = g(rng);
        const double im = g(rng);
        v = {re, im};
    }
    return m;
}

std::string dims_label(std::size_t n_t, std::size_t n_c) { return fmt::format("{}T{}R", n_t, n_c); }

} // namespace

json config_to_json(const Config& cfg)
{
    const Experiment& e = cfg.experiment;
    json j;
    j["dims"] = {{"n_dft", e.dims.n_dft}, {"n_t", e.dims.n_t}, {"n_r", e.dims.n_r}};
    json taps = json::array();
    for (const auto& t : e.pdp.taps())
        taps.push_back({{"delay_ns", t.delay_ns}, {"power_db", t.power_db}});
    j["pdp"] = {{"source", cfg.pdp_source}, {"sample_period_ns", e.pdp.sample_period_ns()}, {"taps", taps}};
    j["correlation"] = {{"rho_tx", e.correlation.rho_tx}, {"rho_rx", e.correlation.rho_rx}};
    j["recovery"] = {{"kappa", e.kappa == 0 ? json("auto") : json(e.kappa)},
                     {"tau", e.tau},
                     {"i_max", e.i_max},
                     {"algorithm", std::string(to_string(e.algorithm))},
                     {"resolve_after_prune", e.resolve_after_prune}};
    json usable = nullptr;
    if (!e.usable_tones.empty())
    {
        usable = json::array();
        for (std::size_t k = 0; k < e.usable_tones.size(); ++k)
            if (e.usable_tones[k])
                usable.push_back(k);
    }
    j["sounding"] = {{"seed", e.allocation_seed},
                     {"n_kappa", e.n_kappa},
                     {"snr_db", number(e.snr_db)},
                     {"power_mode", std::string(to_string(e.power_mode))},
                     {"threshold_db", e.threshold_db ? json(*e.threshold_db) : json(nullptr)},
                     {"usable_tones", usable}};
    j["feedback"] = {{"mode", std::string(to_string(e.feedback_mode))},
                     {"quant_bits", e.quant_bits ? json(*e.quant_bits) : json("ideal")},
                     {"n_tones", e.feedback_tones},
                     {"ltf_duration_us", e.ltf_duration_us}};
    j["trials"] = e.trials;
    j["master_seed"] = e.master_seed;
    return j;
}

json result_to_json(const Config& cfg, const ExperimentResult& r)
{
    json j;
    j["config"] = config_to_json(cfg);
    j["status"] = r.status;
    j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    j["trial"] = r.trial;
    j["seeds"] = {{"channel", r.seeds.channel},
                  {"allocation", r.seeds.measurement.allocation},
                  {"subsample", r.seeds.measurement.subsample},
                  {"noise", r.seeds.measurement.noise}};
    j["sparsity"] = {{"true", r.sparsity_true},
                     {"thresholded", r.sparsity_thresholded},
                     {"kappa_used", r.kappa_used},
                     {"discarded_energy", number(r.discarded_energy)}};
    j["mse"] = number(r.mse);
    j["mse_freq"] = number(r.mse_freq);
    j["measurement"] = {{"n_kappa", r.model.n_kappa()},
                        {"feedback_bits", r.model.feedback_bits},
                        {"selected_rows", r.model.selected_rows}};
    j["recovery"] = r.recovery ? recovery_to_json(*r.recovery) : json(nullptr);
    j["mac_model_per_iteration"] = r.mac_model_per_iteration;
    j["overhead"] = {{"conventional", report_to_json(r.overhead.conventional)},
                     {"proposed", report_to_json(r.overhead.proposed)}};
    return j;
}

json overhead_to_json(const OverheadInputs& in, const OverheadReport& report)
{
    json j;
    j["inputs"] = {{"n_dft", in.dims.n_dft},
                   {"n_t", in.dims.n_t},
                   {"n_r", in.dims.n_r},
                   {"mode", std::string(to_string(in.mode))},
                   {"n_kappa", in.n_kappa},
                   {"n_tones", in.n_tones},
                   {"ltf_duration_us", number(in.ltf_duration_us)},
                   {"quant_bits", in.quant_bits ? json(*in.quant_bits) : json("ideal")}};
    j["conventional"] = report_to_json(report.conventional);
    j["proposed"] = report_to_json(report.proposed);
    j["table_row"] = {{"dims", dims_label(in.dims.n_t, in.dims.n_r)},
                      {"angle_pairs", angle_pairs(in.dims.n_t, in.dims.n_r)},
                      {"su_bits_per_tone", bits_per_tone(in.dims.n_t, in.dims.n_r, FeedbackMode::su)},
                      {"mu_bits_per_tone", bits_per_tone(in.dims.n_t, in.dims.n_r, FeedbackMode::mu)}};
    return j;
}

void write_channel_csv(std::ostream& out, const ExperimentResult& r)
{
    out << "domain,index,re_true,im_true,re_rec,im_rec\n";
    const auto emit = [&](const char* domain, const ComplexMatrix& t, const ComplexMatrix* rec) {
        for (std::size_t i = 0; i < t.data().size(); ++i)
        {
            const Complex a = t.data()[i];
            const Complex b = rec ? rec->data()[i] : Complex{};
            out << domain << ',' << i << ',' << g17(a.real()) << ',' << g17(a.imag()) << ',' << g17(b.real())
                << ',' << g17(b.imag()) << '\n';
        }
    };
    const ComplexMatrix truth_beam = r.truth.delay_beam();
    const ComplexMatrix rec_beam = r.recovered ? r.recovered->delay_beam() : ComplexMatrix(1, 1);
    emit("delay_beam", truth_beam, r.recovered ? &rec_beam : nullptr);
    emit("freq", r.truth.h_freq, r.recovered ? &r.recovered->h_freq : nullptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "n_kappa,trial,mse,iterations,mac_count,converged\n";
    for (const auto& r : rows)
        out << r.n_kappa << ',' << r.trial << ',' << g17(r.mse) << ',' << r.iterations << ',' << r.mac_count << ','
            << (r.converged ? 1 : 0) << '\n';
}

std::vector<std::size_t> parse_size_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try
        {
            v = std::stoull(item, &pos);
        }
        catch (const std::exception&)
        {
            pos = 0;
        }
        if (pos == 0 || pos != item.size() || item.front() == '-')
            throw ConfigError("--nkappa-list: '" + item + "' is not a positive integer");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty())
        throw ConfigError("--nkappa-list: the list is empty");
    return out;
}

int cmd_simulate(const Config& cfg, std::ostream& log)
{
    const ExperimentResult r = run_experiment(cfg.experiment, 0);
    ensure_dir(cfg.output_dir);
    write_text(cfg.output_dir / "result.json", result_to_json(cfg, r).dump(2) + "\n");
    std::ostringstream csv;
    write_channel_csv(csv, r);
    write_text(cfg.output_dir / "channel.csv", csv.str());

    if (r.status != "ok")
    {
        fmt::print(log, "solver failure: {}\n", r.error);
        return exit_solver;
    }
    fmt::print(log, "status={} mse={:.6g} iterations={} kappa={} n_kappa={}\n",
               std::string(to_string(r.recovery->status)), r.mse, r.recovery->iterations, r.kappa_used,
               r.model.n_kappa());
    return exit_ok;
}

int cmd_sweep(const Config& cfg, const std::vector<std::size_t>& n_kappa_list, std::ostream& log)
{
    const auto rows = sweep_nkappa(cfg.experiment, n_kappa_list, cfg.experiment.trials);
    ensure_dir(cfg.output_dir);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text(cfg.output_dir / "sweep.csv", csv.str());

    std::size_t failures = 0;
    for (const auto& r : rows)
        failures += r.status == "solver_failure" ? 1 : 0;
    fmt::print(log, "{} rows written, {} solver failures\n", rows.size(), failures);
    return exit_ok;
}

int cmd_overhead(const OverheadInputs& in, const std::filesystem::path& out_dir, std::ostream& log)
{
    const auto report = overhead_report(in);
    ensure_dir(out_dir);
    write_text(out_dir / "overhead.json", overhead_to_json(in, report).dump(2) + "\n");
    fmt::print(log, "conventional: {} bits, {} LTF ({} us); punctured: {} bits, {} LTF ({} us)\n",
               report.conventional.total_bits, report.conventional.ltf_symbols, report.conventional.airtime_us,
               report.proposed.total_bits, report.proposed.ltf_symbols, report.proposed.airtime_us);
    return exit_ok;
}

int cmd_selfcheck(bool corrupt_p, std::ostream& log)
{
    std::mt19937_64 rng(20240229);
    const PMatrix p = corrupt_p ? PMatrix::cyclic(4).corrupted() : PMatrix::cyclic(4);

    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"kron_consistency",
         [&] {
             for (auto [r, c] : {std::pair<std::size_t, std::size_t>{8, 2}, {64, 8}, {256, 8}})
                 if (!(kron_consistency_check(random_matrix(r, c, rng)) < 1e-10))
                     return false;
             return true;
         }},
        {"p_matrix_orthogonal", [&] { return p.is_orthogonal(); }},
        {"conventional_sounding_exact",
         [&] {
             const ChannelDims dims{16, 4, 4};
             const auto h = generate_channel(PdpSpec::default_profile(), dims, {}, 7);
             const auto ltf = LtfSequence::all_ones(dims.n_dft);
             const auto y = receive_ltf(transmit_ltf_conventional(ltf, p), h,
                                        std::numeric_limits<double>::infinity(), 0);
             const auto est = estimate_conventional(y, ltf, p);
             for (std::size_t k = 0; k < dims.n_dft; ++k)
                 if (!(max_abs(est[k] - h.tone_matrix(k)) < 1e-12))
                     return false;
             return true;
         }},
        {"givens_round_trip",
         [&] {
             for (auto [nt, nc] : {std::pair<std::size_t, std::size_t>{2, 1}, {4, 2}, {8, 2}, {16, 4}})
                 for (int i = 0; i < 5; ++i)
                 {
                     const auto v = svd_small(random_matrix(nt, nc, rng)).u;
                     if (!(column_phase_distance(v, givens_reconstruct(givens_decompose(v))) < 1e-9))
                         return false;
                 }
             return true;
         }},
        {"feedback_bit_table",
         [&] {
             const std::size_t dims[5][2] = {{2, 2}, {4, 2}, {8, 2}, {16, 2}, {16, 4}};
             const std::size_t su[5] = {10, 50, 130, 290, 540};
             const std::size_t mu[5] = {16, 80, 208, 464, 864};
             for (int i = 0; i < 5; ++i)
                 if (bits_per_tone(dims[i][0], dims[i][1], FeedbackMode::su) != su[i] ||
                     bits_per_tone(dims[i][0], dims[i][1], FeedbackMode::mu) != mu[i])
                     return false;
             return total_feedback_bits(16, 4, FeedbackMode::mu, 234) == 202176;
         }},
        {"allocation_partition",
         [&] {
             const auto a = allocate_ltf(52, 4, 0xACE1);
             for (std::size_t t = 0; t < 4; ++t)
                 if (a.tones_for(t).size() != 13)
                     return false;
             return true;
         }},
    };

    int failed = 0;
    for (const auto& [name, fn] : checks)
    {
        bool ok = false;
        try
        {
            ok = fn();
        }
        catch (const std::exception& e)
        {
            fmt::print(log, "{}: exception: {}\n", name, e.what());
        }
        fmt::print(log, "{:<28} {}\n", name, ok ? "PASS" : "FAIL");
        failed += ok ? 0 : 1;
    }
    fmt::print(log, "{} of {} checks passed\n", checks.size() - static_cast<std::size_t>(failed), checks.size());
    return failed ? 1 : 0;
}

} // namespace cssound::cli
