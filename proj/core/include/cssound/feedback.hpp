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

#ifndef CSSOUND_FEEDBACK_HPP
#define CSSOUND_FEEDBACK_HPP

#include "cssound/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cssound {

class NotSemiUnitary : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

enum class FeedbackMode
{
    su,
    mu
};

std::string_view to_string(FeedbackMode m);
FeedbackMode parse_feedback_mode(std::string_view s);

/// Quantizer widths (b_phi, b_psi): SU (6, 4), MU (9, 7).
struct AngleBits
{
    int phi = 0;
    int psi = 0;
};
AngleBits angle_bits(FeedbackMode mode);

/// Givens parametrization of an n_t x n_c precoder. For column i (0-based) the
/// phi angles cover rows i..n_t-2 and the psi angles rows i+1..n_t-1; both
/// lists are column-major in that order.
struct GivensAngles
{
    std::size_t n_t = 0;
    std::size_t n_c = 0;
    std::vector<double> phi; ///< [0, 2 pi)
    std::vector<double> psi; ///< [0, pi / 2]
};

/// Number of (phi, psi) pairs: sum over i = 1..min(n_c, n_t - 1) of (n_t - i).
std::size_t angle_pairs(std::size_t n_t, std::size_t n_c);

GivensAngles givens_decompose(const ComplexMatrix& v);
ComplexMatrix givens_reconstruct(const GivensAngles& angles);

/// Snaps every angle to the nearest level of the mode's quantizer.
GivensAngles quantize_angles(const GivensAngles& angles, FeedbackMode mode);

/// ||V V^H - W W^H||_F / sqrt(2).
double chordal_distance(const ComplexMatrix& v, const ComplexMatrix& w);
/// min over per-column phases theta of ||w - v diag(e^{j theta})||_F.
double column_phase_distance(const ComplexMatrix& v, const ComplexMatrix& w);

std::size_t bits_per_tone(std::size_t n_t, std::size_t n_c, FeedbackMode mode);
std::uint64_t total_feedback_bits(std::size_t n_t, std::size_t n_c, FeedbackMode mode, std::size_t n_tones);

/// Raw-measurement feedback for the punctured scheme.
struct QuantizedMeasurements
{
    static constexpr std::size_t header_bits = 8; ///< shared exponent, two's complement

    /// Payload plus header size for `count` values.
    static std::uint64_t bits_for(std::size_t count, std::optional<int> bits_per_component);

    std::optional<int> bits_per_component; ///< nullopt: unquantized 64-bit components
    int exponent = 0;                      ///< full scale is 2^exponent
    std::size_t count = 0;
    std::vector<std::uint8_t> packed;      ///< MSB-first payload
    std::uint64_t bit_count = 0;
    ComplexVector values;                  ///< what the receiver reconstructs
};

/// Uniform mid-rise quantizer on each real and imaginary component; the full
/// scale is the smallest power of two not below the largest component.
QuantizedMeasurements quantize_measurements(std::span<const Complex> values, std::optional<int> bits_per_component);

/// Decodes `packed` as produced by quantize_measurements.
ComplexVector dequantize_measurements(std::span<const std::uint8_t> packed, std::size_t count,
                                      std::optional<int> bits_per_component);

struct FeedbackReport
{
    std::string scheme;
    std::optional<std::size_t> bits_per_tone; ///< set for the angle-based scheme
    std::size_t n_tones = 0;                  ///< tones reported (or measurements for the raw scheme)
    std::uint64_t total_bits = 0;
    std::size_t ltf_symbols = 0;
    double airtime_us = 0.0;                  ///< NDP training airtime
};

} // namespace cssound

#endif // CSSOUND_FEEDBACK_HPP
