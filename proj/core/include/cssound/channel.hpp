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

#ifndef CSSOUND_CHANNEL_HPP
#define CSSOUND_CHANNEL_HPP

#include "cssound/numerics.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cssound {

class DelaySpreadExceedsDft : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct PdpTap
{
    double delay_ns = 0.0;
    double power_db = 0.0;
};

/// Power delay profile. Delays are non-negative and ascending; linear powers are
/// normalized to unit sum at construction.
class PdpSpec
{
public:
    PdpSpec(std::vector<PdpTap> taps, double sample_period_ns);

    /// 18 taps at 10 ns spacing decaying 1 dB per tap, sampled at 50 ns (20 MHz).
    static PdpSpec default_profile();

    const std::vector<PdpTap>& taps() const noexcept { return taps_; }
    double sample_period_ns() const noexcept { return sample_period_ns_; }
    /// Normalized linear tap powers, same order as taps().
    const std::vector<double>& linear_powers() const noexcept { return linear_; }

private:
    std::vector<PdpTap> taps_;
    double sample_period_ns_;
    std::vector<double> linear_;
};

struct BinnedTap
{
    std::size_t sample_index = 0;
    double power = 0.0;

    bool operator==(const BinnedTap&) const = default;
};

/// Sums the taps falling into each sample period; output is ascending in sample_index.
std::vector<BinnedTap> bin_pdp(const PdpSpec& pdp);

/// Exponential antenna correlation R[i, j] = rho^|i - j| on each side.
struct SpatialCorrelation
{
    double rho_tx = 0.0;
    double rho_rx = 0.0;

    void validate() const;
};

ComplexMatrix exponential_correlation(std::size_t n, double rho);

struct ChannelDims
{
    std::size_t n_dft = 1;
    std::size_t n_t = 1;
    std::size_t n_r = 1;

    std::size_t n_s() const noexcept { return n_t * n_r; }
    /// Spatial column of TX antenna `tx` and RX antenna `rx`; TX runs fastest.
    std::size_t spatial_index(std::size_t tx, std::size_t rx) const noexcept { return rx * n_t + tx; }
    KronDims kron() const noexcept { return {n_dft, n_s()}; }

    bool operator==(const ChannelDims&) const = default;
};

/// One MIMO channel draw. h_time holds the per-path impulse responses as
/// columns (n_dft x n_s); h_freq is their column-wise unitary FFT.
struct ChannelRealization
{
    ChannelDims dims;
    ComplexMatrix h_time;
    ComplexMatrix h_freq;
    std::uint64_t seed = 0;

    static ChannelRealization from_time(ChannelDims dims, ComplexMatrix h_time, std::uint64_t seed);
    /// Builds the realization from the delay-beam matrix [h(n, v)].
    static ChannelRealization from_delay_beam(ChannelDims dims, const ComplexMatrix& delay_beam, std::uint64_t seed);

    /// [h(n, v)]: spatial inverse DFT of h_time, the domain the recovery works in.
    ComplexMatrix delay_beam() const;
    /// H_k(rx, tx).
    Complex freq(std::size_t tone, std::size_t tx, std::size_t rx) const;
    /// N_r x N_t matrix H_k.
    ComplexMatrix tone_matrix(std::size_t tone) const;

    bool operator==(const ChannelRealization&) const = default;
};

ChannelRealization generate_channel(const PdpSpec& pdp, ChannelDims dims, const SpatialCorrelation& corr,
                                    std::uint64_t seed);

enum class ThresholdDomain
{
    delay_beam, ///< two-dimensional transform domain
    delay       ///< per-path impulse responses
};

/// Zeroes entries below max|entry| * 10^(-floor_db / 20); returns how many.
std::size_t threshold_entries(ComplexMatrix& m, double floor_db);

/// threshold_entries in the chosen domain. The result is rebuilt through a
/// transform, so its delay_beam() view carries rounding residue where entries
/// were zeroed.
ChannelRealization threshold_taps(const ChannelRealization& h, double floor_db,
                                  ThresholdDomain domain = ThresholdDomain::delay_beam);

/// Count of exact nonzeros.
std::size_t sparsity(std::span<const Complex> v);
std::size_t sparsity(const ComplexMatrix& m);

} // namespace cssound

#endif // CSSOUND_CHANNEL_HPP
