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

#include "cssound/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace cssound {

ComplexVector vectorize_rowmajor(const ComplexMatrix& m)
{
    return ComplexVector(m.data().begin(), m.data().end());
}

ComplexMatrix devectorize(std::span<const Complex> v, std::size_t rows, std::size_t cols)
{
    if (v.size() != rows * cols)
        throw std::invalid_argument("devectorize: length does not match dimensions");
    return ComplexMatrix(rows, cols, std::vector<Complex>(v.begin(), v.end()));
}

double kron_consistency_check(const ComplexMatrix& h)
{
    const KronDims dims{h.rows(), h.cols()};
    const ComplexVector two_sided = vectorize_rowmajor(fft2d(h));
    const ComplexVector flat = vectorize_rowmajor(h);

    ComplexVector row(dims.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < dims.size(); ++r)
    {
        kron_row_into(dims, r, row);
        Complex acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c)
            acc += row[c] * flat[c];
        worst = std::max(worst, std::abs(acc - two_sided[r]));
    }
    return worst;
}

// ----- Measurement model -----------------------------------------------------------

MeasurementModel build_measurement_model(const ChannelRealization& h, const LtfAllocation& alloc,
                                         const LtfSequence& ltf, const MeasurementOptions& opts,
                                         const MeasurementSeeds& seeds)
{
    const auto estimates = punctured_sound_and_estimate(h, alloc, ltf, opts.snr_db, opts.power_mode, seeds.noise);
    if (opts.n_kappa == 0)
        throw std::invalid_argument("build_measurement_model: n_kappa must be positive");
    if (opts.n_kappa > estimates.size())
        throw TooManyMeasurementsRequested("requested n_kappa = " + std::to_string(opts.n_kappa) + " but only " +
                                           std::to_string(estimates.size()) + " tone estimates are available");

    const auto perm = knuth_shuffle(estimates.size(), seeds.subsample);
    std::vector<std::size_t> chosen(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(opts.n_kappa));
    std::sort(chosen.begin(), chosen.end());

    const auto& dims = h.dims;
    MeasurementModel model;
    model.dims = dims.kron();
    model.seeds = seeds;
    model.snr_db = opts.snr_db;
    model.quant_bits = opts.quant_bits;
    model.selected_rows.reserve(chosen.size());
    ComplexVector raw;
    raw.reserve(chosen.size());
    for (auto idx : chosen)
    {
        const auto& e = estimates[idx];
        model.selected_rows.push_back(e.tone * dims.n_s() + dims.spatial_index(e.tx, e.rx));
        raw.push_back(e.value);
    }

    auto q = quantize_measurements(raw, opts.quant_bits);
    model.y = std::move(q.values);
    model.feedback_bits = q.bit_count;
    return model;
}

RecoveredChannel recover_channel(const MeasurementModel& model, ChannelDims dims, const RecoveryConfig& cfg,
                                 Algorithm algorithm)
{
    if (!(model.dims == dims.kron()))
        throw std::invalid_argument("recover_channel: model and channel dimensions differ");
    const auto op = MeasurementOperator::from_kron_rows(model.dims, model.selected_rows);
    auto result = recover(algorithm, op, model.y, cfg);
    const ComplexMatrix delay_beam = devectorize(result.x_hat, dims.n_dft, dims.n_s());
    return {ChannelRealization::from_delay_beam(dims, delay_beam, 0), std::move(result)};
}

namespace {

double relative_error(std::span<const Complex> truth, std::span<const Complex> estimate)
{
    if (truth.size() != estimate.size())
        throw std::invalid_argument("mse: shape mismatch");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        err += std::norm(estimate[i] - truth[i]);
        ref += std::norm(truth[i]);
    }
    if (ref == 0.0)
        return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return err / ref;
}

} // namespace

double mse(const ChannelRealization& truth, const ChannelRealization& estimate)
{
    return relative_error(truth.delay_beam().data(), estimate.delay_beam().data());
}

double mse_freq(const ChannelRealization& truth, const ChannelRealization& estimate)
{
    return relative_error(truth.h_freq.data(), estimate.h_freq.data());
}

OverheadReport overhead_report(const OverheadInputs& in)
{
    OverheadReport r;
    r.conventional.scheme = "conventional";
    r.conventional.bits_per_tone = bits_per_tone(in.dims.n_t, in.dims.n_r, in.mode);
    r.conventional.n_tones = in.n_tones;
    r.conventional.total_bits = total_feedback_bits(in.dims.n_t, in.dims.n_r, in.mode, in.n_tones);
    r.conventional.ltf_symbols = in.dims.n_t;
    r.conventional.airtime_us =
        ndp_airtime_us(in.dims.n_t, SoundingScheme::conventional, in.n_kappa, in.dims.n_dft, in.ltf_duration_us);

    r.proposed.scheme = "punctured";
    r.proposed.n_tones = in.n_kappa;
    r.proposed.total_bits = QuantizedMeasurements::bits_for(in.n_kappa, in.quant_bits);
    r.proposed.ltf_symbols = punctured_ltf_symbols(in.n_kappa, in.dims.n_dft);
    r.proposed.airtime_us =
        ndp_airtime_us(in.dims.n_t, SoundingScheme::punctured, in.n_kappa, in.dims.n_dft, in.ltf_duration_us);
    return r;
}

// ----- Experiments -------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::size_t trial, std::uint64_t stream)
{
    return splitmix64(splitmix64(master) ^ splitmix64((static_cast<std::uint64_t>(trial) << 8) | stream));
}

std::uint16_t lfsr_seed(std::uint64_t x) { return static_cast<std::uint16_t>(x % 65535u + 1u); }

std::size_t sounded_tones(const Experiment& e)
{
    if (e.usable_tones.empty())
        return e.dims.n_dft;
    return static_cast<std::size_t>(std::count(e.usable_tones.begin(), e.usable_tones.end(), true));
}

} // namespace

void Experiment::validate() const
{
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (dims.n_dft == 0 || dims.n_t == 0 || dims.n_r == 0)
        fail("dims: n_dft, n_t and n_r must be positive");
    if (!usable_tones.empty() && usable_tones.size() != dims.n_dft)
        fail("sounding.usable_tones: mask length must equal dims.n_dft");
    if (sounded_tones(*this) < dims.n_t)
        fail("sounding.usable_tones: fewer usable tones than transmit antennas");
    if (allocation_seed == 0)
        fail("sounding.seed: must be a nonzero 16-bit value");
    correlation.validate();
    if (bin_pdp(pdp).back().sample_index >= dims.n_dft)
        fail("pdp: delay spread spans more samples than dims.n_dft");
    const std::size_t available = sounded_tones(*this) * dims.n_r;
    if (n_kappa == 0 || n_kappa > available)
        fail("sounding.n_kappa: must lie in [1, " + std::to_string(available) + "] (sounded tones x n_r)");
    if (kappa != 0 && 2 * kappa > n_kappa)
        fail("recovery.kappa: 2 * kappa = " + std::to_string(2 * kappa) + " exceeds sounding.n_kappa = " +
             std::to_string(n_kappa));
    if (!(tau > 0.0 && tau < 1.0))
        fail("recovery.tau: must lie in (0, 1)");
    if (i_max < 1)
        fail("recovery.i_max: must be >= 1");
    if (threshold_db && !(*threshold_db > 0.0))
        fail("sounding.threshold_db: must be positive");
    if (quant_bits && (*quant_bits < 1 || *quant_bits > 32))
        fail("feedback.quant_bits: must lie in [1, 32]");
    if (!(ltf_duration_us > 0.0))
        fail("feedback.ltf_duration_us: must be positive");
    if (trials == 0)
        fail("trials: must be >= 1");
}

TrialSeeds derive_trial_seeds(const Experiment& e, std::size_t trial)
{
    TrialSeeds s;
    s.channel = stream_seed(e.master_seed, trial, 0);
    s.measurement.allocation =
        trial == 0 ? e.allocation_seed : lfsr_seed(stream_seed(e.allocation_seed, trial, 3));
    s.measurement.subsample = lfsr_seed(stream_seed(e.master_seed, trial, 1));
    s.measurement.noise = stream_seed(e.master_seed, trial, 2);
    return s;
}

ExperimentResult run_experiment(const Experiment& e, std::size_t trial)
{
    e.validate();
    const TrialSeeds seeds = derive_trial_seeds(e, trial);
    ExperimentResult res{.status = "ok",
                         .error = {},
                         .trial = trial,
                         .seeds = seeds,
                         .truth = generate_channel(e.pdp, e.dims, e.correlation, seeds.channel)};

    const ComplexMatrix truth_beam = res.truth.delay_beam();
    res.sparsity_true = sparsity(truth_beam);
    res.sparsity_thresholded = res.sparsity_true;
    if (e.threshold_db)
    {
        ComplexMatrix kept = truth_beam;
        threshold_entries(kept, *e.threshold_db);
        res.thresholded = ChannelRealization::from_delay_beam(e.dims, kept, res.truth.seed);
        res.sparsity_thresholded = sparsity(kept);
        res.discarded_energy = squared_norm((truth_beam - kept).data()) / squared_norm(truth_beam.data());
    }
    res.kappa_used = e.kappa != 0 ? e.kappa : std::clamp<std::size_t>(res.sparsity_thresholded, 1, e.n_kappa / 2);
    res.mac_model_per_iteration = mac_model(e.dims.kron().size(), e.n_kappa, res.kappa_used);

    // vector<bool> is bit-packed, so copy it into contiguous storage for the span
    const auto mask = std::make_unique<bool[]>(e.usable_tones.size());
    std::copy(e.usable_tones.begin(), e.usable_tones.end(), mask.get());
    const auto alloc = allocate_ltf(e.dims.n_dft, e.dims.n_t, seeds.measurement.allocation,
                                    std::span<const bool>(mask.get(), e.usable_tones.size()));
    const auto ltf = LtfSequence::all_ones(e.dims.n_dft);
    const MeasurementOptions opts{e.n_kappa, e.snr_db, e.quant_bits, e.power_mode};
    res.model = build_measurement_model(res.truth, alloc, ltf, opts, seeds.measurement);
    res.overhead = overhead_report({e.dims, e.feedback_mode, e.n_kappa, e.feedback_tones, e.ltf_duration_us,
                                    e.quant_bits});

    const RecoveryConfig cfg{res.kappa_used, e.tau, e.i_max, e.resolve_after_prune};
    try
    {
        auto rec = recover_channel(res.model, e.dims, cfg, e.algorithm);
        rec.channel.seed = res.truth.seed;
        res.mse = mse(res.truth, rec.channel);
        res.mse_freq = mse_freq(res.truth, rec.channel);
        res.recovered = std::move(rec.channel);
        res.recovery = std::move(rec.recovery);
    }
    catch (const DegenerateSupport& ex)
    {
        res.status = "solver_failure";
        res.error = ex.what();
    }
    catch (const InsufficientMeasurements& ex)
    {
        res.status = "solver_failure";
        res.error = ex.what();
    }
    return res;
}

std::vector<SweepRow> sweep_nkappa(const Experiment& e, std::span<const std::size_t> n_kappa_list,
                                   std::size_t n_trials)
{
    if (n_kappa_list.empty())
        throw std::invalid_argument("sweep: the n_kappa list is empty");
    if (n_trials == 0)
        throw std::invalid_argument("sweep: trials must be >= 1");

    std::vector<SweepRow> rows;
    rows.reserve(n_kappa_list.size() * n_trials);
    for (auto nk : n_kappa_list)
    {
        Experiment point = e;
        point.n_kappa = nk;
        point.validate();
        for (std::size_t t = 0; t < n_trials; ++t)
        {
            const auto r = run_experiment(point, t);
            SweepRow row;
            row.n_kappa = nk;
            row.trial = t;
            row.mse = r.mse;
            row.mse_freq = r.mse_freq;
            row.kappa = r.kappa_used;
            row.discarded_energy = r.discarded_energy;
            row.status = r.status;
            if (r.recovery)
            {
                row.iterations = r.recovery->iterations;
                row.mac_count = r.recovery->mac_count;
                row.converged = r.recovery->converged();
                row.status = std::string(to_string(r.recovery->status));
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace cssound
