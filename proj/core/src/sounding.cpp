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

#include "cssound/sounding.hpp"

#include <cmath>
#include <random>
#include <string>

namespace cssound {

// ----- P matrix -----------------------------------------------------------------

PMatrix PMatrix::cyclic(std::size_t n)
{
    switch (n)
    {
    case 1: return PMatrix(1, {1});
    case 2: return PMatrix(2, {1, 1, 1, -1});
    case 4:
    {
        constexpr int base[4] = {1, 1, 1, -1};
        std::vector<int> e(16);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                e[r * 4 + c] = base[(r + 4 - c) % 4];
        return PMatrix(4, std::move(e));
    }
    default:
        throw UnsupportedDimension("no built-in P matrix for " + std::to_string(n) +
                                   " antennas; supply the entries explicitly");
    }
}

PMatrix PMatrix::from_entries(std::size_t n, std::vector<int> entries)
{
    if (n == 0 || entries.size() != n * n)
        throw std::invalid_argument("P matrix: expected " + std::to_string(n * n) + " entries");
    for (int v : entries)
        if (v != 1 && v != -1)
            throw std::invalid_argument("P matrix: entries must be +1 or -1");
    PMatrix p(n, std::move(entries));
    if (!p.is_orthogonal())
        throw std::invalid_argument("P matrix: rows are not orthogonal (P * P^T != n * I)");
    return p;
}

PMatrix PMatrix::for_antennas(std::size_t n_t) { return cyclic(n_t); }

bool PMatrix::is_orthogonal() const noexcept
{
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
        {
            long dot = 0;
            for (std::size_t k = 0; k < n_; ++k)
                dot += (*this)(i, k) * (*this)(j, k);
            if (dot != (i == j ? static_cast<long>(n_) : 0))
                return false;
        }
    return true;
}

ComplexMatrix PMatrix::as_matrix() const
{
    ComplexMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_ * n_; ++i)
        m.data()[i] = static_cast<double>(entries_[i]);
    return m;
}

PMatrix PMatrix::corrupted() const
{
    auto e = entries_;
    e.back() = -e.back();
    return PMatrix(n_, std::move(e));
}

// ----- LTF ----------------------------------------------------------------------

LtfSequence LtfSequence::all_ones(std::size_t n_tones) { return LtfSequence{std::vector<int>(n_tones, 1)}; }

LtfSequence LtfSequence::from_symbols(std::vector<int> symbols)
{
    for (int v : symbols)
        if (v != 1 && v != -1)
            throw std::invalid_argument("LTF symbols must be +1 or -1");
    return LtfSequence{std::move(symbols)};
}

double noise_variance(double snr_db, std::size_t n_dft)
{
    if (n_dft == 0)
        throw std::invalid_argument("noise_variance: n_dft must be positive");
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return std::pow(10.0, -snr_db / 10.0) / static_cast<double>(n_dft);
}

namespace {

class NoiseSource
{
public:
    NoiseSource(double variance, std::uint64_t seed) : rng_(seed), gauss_(0.0, std::sqrt(variance / 2.0)), on_(variance > 0.0) {}

    Complex draw()
    {
        if (!on_)
            return {};
        const double re = gauss_(rng_);
        const double im = gauss_(rng_);
        return {re, im};
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_;
    bool on_;
};

} // namespace

ToneTensor transmit_ltf_conventional(const LtfSequence& ltf, const PMatrix& p)
{
    const ComplexMatrix pm = p.as_matrix();
    ToneTensor x;
    x.reserve(ltf.size());
    for (int l : ltf.symbols)
    {
        ComplexMatrix xk = pm;
        for (auto& v : xk.data())
            v *= static_cast<double>(l);
        x.push_back(std::move(xk));
    }
    return x;
}

ToneTensor receive_ltf(const ToneTensor& x, const ChannelRealization& h, double snr_db, std::uint64_t noise_seed)
{
    if (x.size() != h.dims.n_dft)
        throw std::invalid_argument("receive_ltf: one symbol block per tone is required");
    NoiseSource noise(noise_variance(snr_db, h.dims.n_dft), noise_seed);
    ToneTensor y;
    y.reserve(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        if (x[k].rows() != h.dims.n_t)
            throw std::invalid_argument("receive_ltf: transmit block rows must equal n_t");
        ComplexMatrix yk = h.tone_matrix(k) * x[k];
        for (auto& v : yk.data())
            v += noise.draw();
        y.push_back(std::move(yk));
    }
    return y;
}

ToneTensor estimate_conventional(const ToneTensor& y, const LtfSequence& ltf, const PMatrix& p)
{
    if (y.size() != ltf.size())
        throw std::invalid_argument("estimate_conventional: tone count mismatch");
    const ComplexMatrix pt = p.as_matrix().transpose();
    const double n = static_cast<double>(p.size());
    ToneTensor est;
    est.reserve(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
    {
        if (y[k].cols() != p.size())
            throw std::invalid_argument("estimate_conventional: LTF count does not match P dimension");
        ComplexMatrix hk = y[k] * pt;
        const double scale = 1.0 / (n * static_cast<double>(ltf.symbols[k]));
        for (auto& v : hk.data())
            v *= scale;
        est.push_back(std::move(hk));
    }
    return est;
}

// ----- LFSR / shuffle -------------------------------------------------------------

Lfsr16::Lfsr16(std::uint16_t seed) : state_(seed)
{
    if (seed == 0)
        throw std::invalid_argument("LFSR seed must be nonzero");
}

unsigned Lfsr16::step() noexcept
{
    const unsigned bit = (state_ ^ (state_ >> 2) ^ (state_ >> 3) ^ (state_ >> 5)) & 1u;
    state_ = static_cast<std::uint16_t>((state_ >> 1) | (bit << 15));
    return bit;
}

std::uint16_t Lfsr16::next_word() noexcept
{
    for (int i = 0; i < 16; ++i)
        step();
    return state_;
}

std::vector<std::uint16_t> lfsr_stream(std::uint16_t seed, std::size_t count)
{
    Lfsr16 lfsr(seed);
    std::vector<std::uint16_t> out(count);
    for (auto& w : out)
        w = lfsr.next_word();
    return out;
}

std::vector<std::size_t> knuth_shuffle(std::size_t n, std::uint16_t seed)
{
    if (n > 65536)
        throw std::invalid_argument("knuth_shuffle: at most 65536 elements");
    Lfsr16 lfsr(seed);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    for (std::size_t i = n; i-- > 1;)
    {
        const std::uint32_t range = static_cast<std::uint32_t>(i + 1);
        const std::uint32_t limit = (65536u / range) * range;
        std::uint32_t w = lfsr.next_word();
        while (w >= limit)
            w = lfsr.next_word();
        std::swap(perm[i], perm[w % range]);
    }
    return perm;
}

std::vector<std::size_t> LtfAllocation::tones_for(std::size_t antenna) const
{
    std::vector<std::size_t> tones;
    for (std::size_t k = 0; k < antenna_of_tone.size(); ++k)
        if (antenna_of_tone[k] == static_cast<int>(antenna))
            tones.push_back(k);
    return tones;
}

LtfAllocation allocate_ltf(std::size_t n_dft, std::size_t n_t, std::uint16_t seed, std::span<const bool> usable)
{
    if (n_dft == 0 || n_t == 0)
        throw std::invalid_argument("allocate_ltf: n_dft and n_t must be positive");
    if (!usable.empty() && usable.size() != n_dft)
        throw std::invalid_argument("allocate_ltf: usable-tone mask length must equal n_dft");

    std::vector<std::size_t> tones;
    for (std::size_t k = 0; k < n_dft; ++k)
        if (usable.empty() || usable[k])
            tones.push_back(k);
    if (tones.size() < n_t)
        throw std::invalid_argument("allocate_ltf: fewer usable tones than transmit antennas");

    const auto perm = knuth_shuffle(tones.size(), seed);

    LtfAllocation alloc{n_dft, n_t, seed, std::vector<int>(n_dft, LtfAllocation::unsounded)};
    const std::size_t base = tones.size() / n_t;
    const std::size_t extra = tones.size() % n_t;
    std::size_t pos = 0;
    for (std::size_t a = 0; a < n_t; ++a)
    {
        const std::size_t chunk = base + (a < extra ? 1 : 0);
        for (std::size_t i = 0; i < chunk; ++i, ++pos)
            alloc.antenna_of_tone[tones[perm[pos]]] = static_cast<int>(a);
    }
    return alloc;
}

std::string_view to_string(PowerMode m) { return m == PowerMode::boosted ? "boosted" : "unboosted"; }

PowerMode parse_power_mode(std::string_view s)
{
    if (s == "boosted")
        return PowerMode::boosted;
    if (s == "unboosted")
        return PowerMode::unboosted;
    throw std::invalid_argument("unknown power mode '" + std::string(s) + "' (expected boosted or unboosted)");
}

std::vector<ToneEstimate> punctured_sound_and_estimate(const ChannelRealization& h, const LtfAllocation& alloc,
                                                       const LtfSequence& ltf, double snr_db, PowerMode mode,
                                                       std::uint64_t noise_seed)
{
    const auto& dims = h.dims;
    if (alloc.n_dft != dims.n_dft || alloc.n_t != dims.n_t || ltf.size() != dims.n_dft)
        throw std::invalid_argument("punctured_sound_and_estimate: allocation, LTF and channel dimensions differ");

    const double gain = mode == PowerMode::boosted ? std::sqrt(static_cast<double>(dims.n_t)) : 1.0;
    NoiseSource noise(noise_variance(snr_db, h.dims.n_dft), noise_seed);

    std::vector<ToneEstimate> out;
    out.reserve(dims.n_dft * dims.n_r);
    for (std::size_t k = 0; k < dims.n_dft; ++k)
    {
        const int tx = alloc.antenna_of_tone[k];
        if (tx == LtfAllocation::unsounded)
            continue;
        const double sym = static_cast<double>(ltf.symbols[k]) * gain;
        for (std::size_t m = 0; m < dims.n_r; ++m)
        {
            const auto l = static_cast<std::size_t>(tx);
            const Complex received = h.freq(k, l, m) * sym + noise.draw();
            out.push_back({k, l, m, received / sym});
        }
    }
    return out;
}

std::size_t punctured_ltf_symbols(std::size_t n_kappa, std::size_t n_dft)
{
    if (n_dft == 0)
        throw std::invalid_argument("punctured_ltf_symbols: n_dft must be positive");
    const std::size_t m = std::max<std::size_t>(n_kappa, 1);
    return (m + n_dft - 1) / n_dft;
}

double ndp_airtime_us(std::size_t n_t, SoundingScheme scheme, std::size_t n_kappa, std::size_t n_dft,
                      double ltf_duration_us)
{
    if (scheme == SoundingScheme::conventional)
        return static_cast<double>(n_t) * ltf_duration_us;
    return static_cast<double>(punctured_ltf_symbols(n_kappa, n_dft)) * ltf_duration_us;
}

} // namespace cssound
