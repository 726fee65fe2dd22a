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

#ifndef CSSOUND_SOUNDING_HPP
#define CSSOUND_SOUNDING_HPP

#include "cssound/channel.hpp"
#include "cssound/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cssound {

class UnsupportedDimension : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Orthogonal +/-1 LTF mapping matrix, P * P^T = n * I.
class PMatrix
{
public:
    /// Built-in construction for n in {1, 2, 4}. For n = 4 column j is the
    /// column vector [1, 1, 1, -1]^T cyclically shifted down by j.
    static PMatrix cyclic(std::size_t n);
    /// Externally supplied entries (row-major); rejected unless +/-1 and orthogonal.
    static PMatrix from_entries(std::size_t n, std::vector<int> entries);
    /// cyclic(n) where available, otherwise UnsupportedDimension.
    static PMatrix for_antennas(std::size_t n_t);

    std::size_t size() const noexcept { return n_; }
    int operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * n_ + c]; }
    const std::vector<int>& entries() const noexcept { return entries_; }
    bool is_orthogonal() const noexcept;
    ComplexMatrix as_matrix() const;

    /// Test hook: flips one entry without re-validating.
    PMatrix corrupted() const;

private:
    PMatrix(std::size_t n, std::vector<int> entries) : n_(n), entries_(std::move(entries)) {}

    std::size_t n_;
    std::vector<int> entries_;
};

/// Known per-tone LTF symbols, each +1 or -1.
struct LtfSequence
{
    std::vector<int> symbols;

    static LtfSequence all_ones(std::size_t n_tones);
    static LtfSequence from_symbols(std::vector<int> symbols);
    std::size_t size() const noexcept { return symbols.size(); }
};

/// Per-tone symbol blocks; element k is the matrix for tone k.
using ToneTensor = std::vector<ComplexMatrix>;

/// Noise variance per complex sample on the unitary tone grid. A unit-energy
/// TX-RX pair carries 1/n_dft per tone there, so the per-tone SNR is snr_db.
double noise_variance(double snr_db, std::size_t n_dft);

/// X_k = P * L_k (N_t antennas x N_ltf symbols).
ToneTensor transmit_ltf_conventional(const LtfSequence& ltf, const PMatrix& p);

/// Y_k = H_k X_k + noise. An infinite snr_db gives the noiseless product.
ToneTensor receive_ltf(const ToneTensor& x, const ChannelRealization& h, double snr_db, std::uint64_t noise_seed);

/// H_k = Y_k P^T / (n L_k).
ToneTensor estimate_conventional(const ToneTensor& y, const LtfSequence& ltf, const PMatrix& p);

// ----- LFSR-driven tone allocation --------------------------------------------

/// 16-bit Fibonacci LFSR, x^16 + x^14 + x^13 + x^11 + 1 (maximal length).
class Lfsr16
{
public:
    explicit Lfsr16(std::uint16_t seed);

    std::uint16_t state() const noexcept { return state_; }
    /// Advances one bit and returns the bit shifted in.
    unsigned step() noexcept;
    /// Advances 16 bits and returns the new state.
    std::uint16_t next_word() noexcept;

private:
    std::uint16_t state_;
};

std::vector<std::uint16_t> lfsr_stream(std::uint16_t seed, std::size_t count);

/// Fisher-Yates permutation of 0..n-1 driven by Lfsr16 words, with rejection
/// of words >= floor(2^16 / k) * k when drawing from a range of size k.
std::vector<std::size_t> knuth_shuffle(std::size_t n, std::uint16_t seed);

struct LtfAllocation
{
    static constexpr int unsounded = -1;

    std::size_t n_dft = 0;
    std::size_t n_t = 0;
    std::uint16_t seed = 0;
    /// TX antenna per tone, or `unsounded` for tones masked out.
    std::vector<int> antenna_of_tone;

    std::vector<std::size_t> tones_for(std::size_t antenna) const;
    bool operator==(const LtfAllocation&) const = default;
};

/// Shuffles the usable tones and hands contiguous chunks of the permutation to
/// antennas 0..n_t-1. An empty mask means every tone is usable.
LtfAllocation allocate_ltf(std::size_t n_dft, std::size_t n_t, std::uint16_t seed,
                           std::span<const bool> usable = {});

enum class PowerMode
{
    unboosted,
    boosted ///< the whole transmit power on the single active antenna
};

std::string_view to_string(PowerMode m);
PowerMode parse_power_mode(std::string_view s);

struct ToneEstimate
{
    std::size_t tone = 0;
    std::size_t tx = 0;
    std::size_t rx = 0;
    Complex value;

    bool operator==(const ToneEstimate&) const = default;
};

/// Punctured sounding: tone k is sent only from antenna alloc(k). Emits one
/// estimate per (sounded tone, RX antenna), tone-major.
std::vector<ToneEstimate> punctured_sound_and_estimate(const ChannelRealization& h, const LtfAllocation& alloc,
                                                       const LtfSequence& ltf, double snr_db, PowerMode mode,
                                                       std::uint64_t noise_seed);

enum class SoundingScheme
{
    conventional,
    punctured
};

/// NDP training airtime in microseconds.
double ndp_airtime_us(std::size_t n_t, SoundingScheme scheme, std::size_t n_kappa, std::size_t n_dft,
                      double ltf_duration_us);

/// LTF symbols the punctured scheme needs: ceil(max(n_kappa, 1) / n_dft).
std::size_t punctured_ltf_symbols(std::size_t n_kappa, std::size_t n_dft);

} // namespace cssound

#endif // CSSOUND_SOUNDING_HPP
