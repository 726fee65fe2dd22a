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

#include "cssound/channel.hpp"

#include <cmath>
#include <random>
#include <string>

namespace cssound {

PdpSpec::PdpSpec(std::vector<PdpTap> taps, double sample_period_ns)
    : taps_(std::move(taps)), sample_period_ns_(sample_period_ns)
{
    if (taps_.empty())
        throw std::invalid_argument("PDP: at least one tap is required");
    if (!(sample_period_ns_ > 0.0) || !std::isfinite(sample_period_ns_))
        throw std::invalid_argument("PDP: sample_period_ns must be positive");
    double prev = 0.0;
    for (const auto& t : taps_)
    {
        if (!std::isfinite(t.delay_ns) || !std::isfinite(t.power_db))
            throw std::invalid_argument("PDP: tap values must be finite");
        if (t.delay_ns < 0.0)
            throw std::invalid_argument("PDP: tap delays must be non-negative");
        if (t.delay_ns < prev)
            throw std::invalid_argument("PDP: tap delays must be ascending");
        prev = t.delay_ns;
    }
    double total = 0.0;
    linear_.reserve(taps_.size());
    for (const auto& t : taps_)
    {
        linear_.push_back(std::pow(10.0, t.power_db / 10.0));
        total += linear_.back();
    }
    for (auto& p : linear_)
        p /= total;
}

PdpSpec PdpSpec::default_profile()
{
    std::vector<PdpTap> taps;
    for (int i = 0; i < 18; ++i)
        taps.push_back({10.0 * i, 0.0 - i});
    return PdpSpec(std::move(taps), 50.0);
}

std::vector<BinnedTap> bin_pdp(const PdpSpec& pdp)
{
    std::vector<BinnedTap> bins;
    const auto& taps = pdp.taps();
    const auto& power = pdp.linear_powers();
    for (std::size_t i = 0; i < taps.size(); ++i)
    {
        const auto idx = static_cast<std::size_t>(std::floor(taps[i].delay_ns / pdp.sample_period_ns()));
        if (bins.empty() || bins.back().sample_index != idx)
            bins.push_back({idx, 0.0});
        bins.back().power += power[i];
    }
    return bins;
}

void SpatialCorrelation::validate() const
{
    if (!(rho_tx >= 0.0 && rho_tx < 1.0) || !(rho_rx >= 0.0 && rho_rx < 1.0))
        throw std::invalid_argument("correlation coefficients must lie in [0, 1)");
}

ComplexMatrix exponential_correlation(std::size_t n, double rho)
{
    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    return r;
}

// ----- ChannelRealization ------------------------------------------------------

ChannelRealization ChannelRealization::from_time(ChannelDims dims, ComplexMatrix h_time, std::uint64_t seed)
{
    if (h_time.rows() != dims.n_dft || h_time.cols() != dims.n_s())
        throw std::invalid_argument("ChannelRealization: h_time shape does not match dims");
    ComplexMatrix h_freq = fft_columns(h_time);
    return ChannelRealization{dims, std::move(h_time), std::move(h_freq), seed};
}

ChannelRealization ChannelRealization::from_delay_beam(ChannelDims dims, const ComplexMatrix& delay_beam,
                                                       std::uint64_t seed)
{
    return from_time(dims, fft_rows(delay_beam), seed);
}

ComplexMatrix ChannelRealization::delay_beam() const { return ifft_rows(h_time); }

Complex ChannelRealization::freq(std::size_t tone, std::size_t tx, std::size_t rx) const
{
    return h_freq.at(tone, dims.spatial_index(tx, rx));
}

ComplexMatrix ChannelRealization::tone_matrix(std::size_t tone) const
{
    ComplexMatrix hk(dims.n_r, dims.n_t);
    for (std::size_t m = 0; m < dims.n_r; ++m)
        for (std::size_t l = 0; l < dims.n_t; ++l)
            hk(m, l) = freq(tone, l, m);
    return hk;
}

ChannelRealization generate_channel(const PdpSpec& pdp, ChannelDims dims, const SpatialCorrelation& corr,
                                    std::uint64_t seed)
{
    if (dims.n_dft == 0 || dims.n_t == 0 || dims.n_r == 0)
        throw std::invalid_argument("generate_channel: dimensions must be positive");
    corr.validate();
    const auto bins = bin_pdp(pdp);
    if (bins.back().sample_index >= dims.n_dft)
        throw DelaySpreadExceedsDft("delay spread spans " + std::to_string(bins.back().sample_index + 1) +
                                    " samples, more than n_dft = " + std::to_string(dims.n_dft));

    const ComplexMatrix l_tx = cholesky(exponential_correlation(dims.n_t, corr.rho_tx));
    const ComplexMatrix l_rx = cholesky(exponential_correlation(dims.n_r, corr.rho_rx));
    const ComplexMatrix l_tx_t = l_tx.transpose();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    ComplexMatrix h_time(dims.n_dft, dims.n_s());
    for (const auto& bin : bins)
    {
        ComplexMatrix g(dims.n_r, dims.n_t);
        for (auto& x : g.data())
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x = {re, im};
        }
        const ComplexMatrix colored = l_rx * g * l_tx_t;
        const double amp = std::sqrt(bin.power);
        for (std::size_t m = 0; m < dims.n_r; ++m)
            for (std::size_t l = 0; l < dims.n_t; ++l)
                h_time(bin.sample_index, dims.spatial_index(l, m)) = colored(m, l) * amp;
    }
    return ChannelRealization::from_time(dims, std::move(h_time), seed);
}

std::size_t threshold_entries(ComplexMatrix& m, double floor_db)
{
    if (!(floor_db > 0.0))
        throw std::invalid_argument("threshold: floor_db must be positive");
    const double cut = max_abs(m) * std::pow(10.0, -floor_db / 20.0);
    std::size_t zeroed = 0;
    for (auto& x : m.data())
    {
        if (x != Complex{} && std::abs(x) < cut)
        {
            x = Complex{};
            ++zeroed;
        }
    }
    return zeroed;
}

ChannelRealization threshold_taps(const ChannelRealization& h, double floor_db, ThresholdDomain domain)
{
    ComplexMatrix work = domain == ThresholdDomain::delay_beam ? h.delay_beam() : h.h_time;
    if (threshold_entries(work, floor_db) == 0)
        return h;
    if (domain == ThresholdDomain::delay_beam)
        return ChannelRealization::from_delay_beam(h.dims, work, h.seed);
    return ChannelRealization::from_time(h.dims, std::move(work), h.seed);
}

std::size_t sparsity(std::span<const Complex> v)
{
    std::size_t n = 0;
    for (const auto& x : v)
        n += (x != Complex{}) ? 1 : 0;
    return n;
}

std::size_t sparsity(const ComplexMatrix& m) { return sparsity(m.data()); }

} // namespace cssound
