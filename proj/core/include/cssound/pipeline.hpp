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

#ifndef CSSOUND_PIPELINE_HPP
#define CSSOUND_PIPELINE_HPP

#include "cssound/channel.hpp"
#include "cssound/feedback.hpp"
#include "cssound/numerics.hpp"
#include "cssound/sounding.hpp"
#include "cssound/sparse_recovery.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cssound {

class TooManyMeasurementsRequested : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// v[n * cols + c] = m(n, c).
ComplexVector vectorize_rowmajor(const ComplexMatrix& m);
ComplexMatrix devectorize(std::span<const Complex> v, std::size_t rows, std::size_t cols);

/// Max elementwise gap between the two-sided transform F h F and the Kronecker
/// rows applied to the row-major vectorization of h.
double kron_consistency_check(const ComplexMatrix& h);

struct MeasurementSeeds
{
    std::uint16_t allocation = 1; ///< LFSR seed shared by both ends of the link
    std::uint16_t subsample = 1;  ///< LFSR seed picking which estimates are fed back
    std::uint64_t noise = 0;
};

struct MeasurementModel
{
    KronDims dims;
    std::vector<std::size_t> selected_rows; ///< ascending, row = k * n_s + s
    ComplexVector y;
    MeasurementSeeds seeds;
    double snr_db = 0.0;
    std::optional<int> quant_bits;
    std::uint64_t feedback_bits = 0;

    std::size_t n_kappa() const noexcept { return selected_rows.size(); }
};

struct MeasurementOptions
{
    std::size_t n_kappa = 0;
    double snr_db = 0.0;          ///< +inf for noiseless
    std::optional<int> quant_bits; ///< nullopt: ideal feedback
    PowerMode power_mode = PowerMode::boosted;
};

/// Punctured sounding at the station, followed by the seeded choice of which
/// n_kappa estimates to feed back and their quantization.
MeasurementModel build_measurement_model(const ChannelRealization& h, const LtfAllocation& alloc,
                                         const LtfSequence& ltf, const MeasurementOptions& opts,
                                         const MeasurementSeeds& seeds);

struct RecoveredChannel
{
    ChannelRealization channel;
    SparseRecoveryResult recovery;
};

RecoveredChannel recover_channel(const MeasurementModel& model, ChannelDims dims, const RecoveryConfig& cfg,
                                 Algorithm algorithm = Algorithm::cosamp);

/// Normalized squared error on the delay-beam vectors.
double mse(const ChannelRealization& truth, const ChannelRealization& estimate);
/// Same measure on the frequency responses.
double mse_freq(const ChannelRealization& truth, const ChannelRealization& estimate);

struct OverheadInputs
{
    ChannelDims dims;
    FeedbackMode mode = FeedbackMode::mu;
    std::size_t n_kappa = 0;
    std::size_t n_tones = 0;
    double ltf_duration_us = 0.0;
    std::optional<int> quant_bits;
};

struct OverheadReport
{
    FeedbackReport conventional;
    FeedbackReport proposed;
};

OverheadReport overhead_report(const OverheadInputs& in);

// ----- Experiments ---------------------------------------------------------------

/// Everything that defines one experiment. All randomness derives from the seeds here.
struct Experiment
{
    ChannelDims dims{256, 4, 2};
    PdpSpec pdp = PdpSpec::default_profile();
    SpatialCorrelation correlation;
    /// 0 picks the realized sparsity of the (thresholded) channel.
    std::size_t kappa = 50;
    double tau = 1e-6;
    int i_max = 50;
    bool resolve_after_prune = false;
    Algorithm algorithm = Algorithm::cosamp;
    std::uint16_t allocation_seed = 0xACE1;
    std::size_t n_kappa = 200;
    double snr_db = std::numeric_limits<double>::infinity();
    PowerMode power_mode = PowerMode::boosted;
    std::optional<double> threshold_db;
    std::optional<int> quant_bits;
    std::vector<bool> usable_tones; ///< empty: all tones
    FeedbackMode feedback_mode = FeedbackMode::mu;
    std::size_t feedback_tones = 234;
    double ltf_duration_us = 12.0;
    std::size_t trials = 1;
    std::uint64_t master_seed = 1;

    /// Cross-field checks; throws std::invalid_argument naming the field.
    void validate() const;
};

struct TrialSeeds
{
    std::uint64_t channel = 0;
    MeasurementSeeds measurement;
};

/// Seeds for one trial. Trial 0 keeps the configured allocation seed.
TrialSeeds derive_trial_seeds(const Experiment& e, std::size_t trial);

struct ExperimentResult
{
    std::string status; ///< "ok" or the solver failure
    std::string error{};
    std::size_t trial = 0;
    TrialSeeds seeds;
    ChannelRealization truth;
    std::optional<ChannelRealization> thresholded{};
    std::optional<ChannelRealization> recovered{};
    std::optional<SparseRecoveryResult> recovery{};
    std::size_t kappa_used = 0;
    std::size_t sparsity_true = 0;
    std::size_t sparsity_thresholded = 0;
    double discarded_energy = 0.0; ///< fraction removed by thresholding
    double mse = 1.0;
    double mse_freq = 1.0;
    std::uint64_t mac_model_per_iteration = 0;
    MeasurementModel model{};
    OverheadReport overhead{};
};

ExperimentResult run_experiment(const Experiment& e, std::size_t trial = 0);

struct SweepRow
{
    std::size_t n_kappa = 0;
    std::size_t trial = 0;
    double mse = 0.0;
    double mse_freq = 0.0;
    int iterations = 0;
    std::uint64_t mac_count = 0;
    bool converged = false;
    std::size_t kappa = 0;
    double discarded_energy = 0.0;
    std::string status;
};

/// One row per (n_kappa, trial), in that order.
std::vector<SweepRow> sweep_nkappa(const Experiment& e, std::span<const std::size_t> n_kappa_list,
                                   std::size_t n_trials);

} // namespace cssound

#endif // CSSOUND_PIPELINE_HPP
