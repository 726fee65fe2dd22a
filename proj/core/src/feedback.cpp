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

#include "cssound/feedback.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

namespace cssound {

std::string_view to_string(FeedbackMode m) { return m == FeedbackMode::su ? "su" : "mu"; }

FeedbackMode parse_feedback_mode(std::string_view s)
{
    if (s == "su" || s == "SU")
        return FeedbackMode::su;
    if (s == "mu" || s == "MU")
        return FeedbackMode::mu;
    throw std::invalid_argument("unknown feedback mode '" + std::string(s) + "' (expected su or mu)");
}

AngleBits angle_bits(FeedbackMode mode)
{
    return mode == FeedbackMode::su ? AngleBits{6, 4} : AngleBits{9, 7};
}

std::size_t angle_pairs(std::size_t n_t, std::size_t n_c)
{
    if (n_t == 0 || n_c == 0)
        throw std::invalid_argument("angle_pairs: dimensions must be positive");
    std::size_t pairs = 0;
    for (std::size_t i = 1; i <= std::min(n_c, n_t - 1); ++i)
        pairs += n_t - i;
    return pairs;
}

std::size_t bits_per_tone(std::size_t n_t, std::size_t n_c, FeedbackMode mode)
{
    const auto b = angle_bits(mode);
    return angle_pairs(n_t, n_c) * static_cast<std::size_t>(b.phi + b.psi);
}

std::uint64_t total_feedback_bits(std::size_t n_t, std::size_t n_c, FeedbackMode mode, std::size_t n_tones)
{
    return static_cast<std::uint64_t>(bits_per_tone(n_t, n_c, mode)) * n_tones;
}

// ----- Givens decomposition ------------------------------------------------------

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_phase(double a)
{
    double w = std::fmod(a, two_pi);
    if (w < 0.0)
        w += two_pi;
    if (w >= two_pi)
        w = 0.0;
    return w;
}

void scale_row(ComplexMatrix& m, std::size_t r, Complex f)
{
    for (auto& x : m.row(r))
        x *= f;
}

// rows (i, l) <- [[c, s], [-s, c]] * rows (i, l)
void rotate_rows(ComplexMatrix& m, std::size_t i, std::size_t l, double c, double s)
{
    for (std::size_t j = 0; j < m.cols(); ++j)
    {
        const Complex a = m(i, j);
        const Complex b = m(l, j);
        m(i, j) = c * a + s * b;
        m(l, j) = -s * a + c * b;
    }
}

} // namespace

GivensAngles givens_decompose(const ComplexMatrix& v)
{
    const std::size_t n_t = v.rows();
    const std::size_t n_c = v.cols();
    if (n_c > n_t)
        throw NotSemiUnitary("givens_decompose: more columns than rows");
    if (max_abs(v.adjoint() * v - ComplexMatrix::identity(n_c)) > 1e-8)
        throw NotSemiUnitary("givens_decompose: columns are not orthonormal");

    ComplexMatrix w = v;
    // Column phases that make the last row real and non-negative are not fed back.
    for (std::size_t c = 0; c < n_c; ++c)
    {
        const Complex last = w(n_t - 1, c);
        if (last != Complex{})
        {
            const Complex rot = std::conj(last) / std::abs(last);
            for (std::size_t r = 0; r < n_t; ++r)
                w(r, c) *= rot;
        }
    }

    GivensAngles out{n_t, n_c, {}, {}};
    const std::size_t columns = std::min(n_c, n_t - 1);
    for (std::size_t i = 0; i < columns; ++i)
    {
        for (std::size_t k = i; k + 1 < n_t; ++k)
        {
            const double phi = wrap_phase(std::arg(w(k, i)));
            out.phi.push_back(phi);
            scale_row(w, k, std::polar(1.0, -phi));
        }
        for (std::size_t l = i + 1; l < n_t; ++l)
        {
            const double a = w(i, i).real();
            const double b = w(l, i).real();
            const double psi = std::clamp(std::atan2(b, a), 0.0, std::numbers::pi / 2.0);
            out.psi.push_back(psi);
            rotate_rows(w, i, l, std::cos(psi), std::sin(psi));
        }
    }
    return out;
}

ComplexMatrix givens_reconstruct(const GivensAngles& angles)
{
    const std::size_t n_t = angles.n_t;
    const std::size_t n_c = angles.n_c;
    const std::size_t pairs = angle_pairs(n_t, n_c);
    if (angles.phi.size() != pairs || angles.psi.size() != pairs)
        throw std::invalid_argument("givens_reconstruct: angle count does not match dimensions");

    ComplexMatrix v(n_t, n_c);
    for (std::size_t c = 0; c < n_c; ++c)
        v(c, c) = 1.0;

    // Offsets of each column's angles within the flat lists.
    const std::size_t columns = std::min(n_c, n_t - 1);
    std::vector<std::size_t> offset(columns + 1, 0);
    for (std::size_t i = 0; i < columns; ++i)
        offset[i + 1] = offset[i] + (n_t - 1 - i);

    for (std::size_t i = columns; i-- > 0;)
    {
        for (std::size_t l = n_t; l-- > i + 1;)
        {
            const double psi = angles.psi[offset[i] + (l - i - 1)];
            rotate_rows(v, i, l, std::cos(psi), -std::sin(psi));
        }
        for (std::size_t k = i; k + 1 < n_t; ++k)
            scale_row(v, k, std::polar(1.0, angles.phi[offset[i] + (k - i)]));
    }
    return v;
}

GivensAngles quantize_angles(const GivensAngles& angles, FeedbackMode mode)
{
    const auto bits = angle_bits(mode);
    auto snap = [](double a, double step, double offset, long levels) {
        const long k = std::lround((a - offset) / step);
        return static_cast<double>(std::clamp(k, 0L, levels - 1)) * step + offset;
    };

    GivensAngles q = angles;
    const long phi_levels = 1L << bits.phi;
    const double phi_step = std::numbers::pi / static_cast<double>(1L << (bits.phi - 1));
    const double phi_offset = std::numbers::pi / static_cast<double>(phi_levels);
    for (auto& a : q.phi)
    {
        // phi is circular: pick the nearest level modulo 2 pi.
        double k = std::round((wrap_phase(a) - phi_offset) / phi_step);
        if (k >= static_cast<double>(phi_levels))
            k -= static_cast<double>(phi_levels);
        if (k < 0.0)
            k += static_cast<double>(phi_levels);
        a = k * phi_step + phi_offset;
    }
    const long psi_levels = 1L << bits.psi;
    const double psi_step = std::numbers::pi / static_cast<double>(1L << (bits.psi + 1));
    const double psi_offset = std::numbers::pi / static_cast<double>(1L << (bits.psi + 2));
    for (auto& a : q.psi)
        a = snap(a, psi_step, psi_offset, psi_levels);
    return q;
}

double chordal_distance(const ComplexMatrix& v, const ComplexMatrix& w)
{
    return norm(v * v.adjoint() - w * w.adjoint()) / std::numbers::sqrt2;
}

double column_phase_distance(const ComplexMatrix& v, const ComplexMatrix& w)
{
    if (v.rows() != w.rows() || v.cols() != w.cols())
        throw std::invalid_argument("column_phase_distance: shape mismatch");
    double acc = 0.0;
    for (std::size_t c = 0; c < v.cols(); ++c)
    {
        Complex inner = 0.0;
        for (std::size_t r = 0; r < v.rows(); ++r)
            inner += std::conj(v(r, c)) * w(r, c);
        const Complex phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex{1.0};
        for (std::size_t r = 0; r < v.rows(); ++r)
            acc += std::norm(w(r, c) - v(r, c) * phase);
    }
    return std::sqrt(acc);
}

// ----- Raw measurement quantizer --------------------------------------------------

namespace {

class BitWriter
{
public:
    void put(std::uint64_t value, int bits)
    {
        for (int b = bits - 1; b >= 0; --b)
        {
            if (used_ % 8 == 0)
                bytes_.push_back(0);
            if ((value >> b) & 1u)
                bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (used_ % 8));
            ++used_;
        }
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t used_ = 0;
};

class BitReader
{
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t get(int bits)
    {
        std::uint64_t v = 0;
        for (int b = 0; b < bits; ++b)
        {
            if (pos_ / 8 >= bytes_.size())
                throw std::invalid_argument("dequantize_measurements: payload too short");
            const unsigned bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
            v = (v << 1) | bit;
            ++pos_;
        }
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_bits(std::optional<int> bits)
{
    if (bits && (*bits < 1 || *bits > 32))
        throw std::invalid_argument("bits_per_component must lie in [1, 32]");
}

double step_for(int exponent, int bits) { return std::ldexp(2.0, exponent - bits); }

} // namespace

std::uint64_t QuantizedMeasurements::bits_for(std::size_t count, std::optional<int> bits_per_component)
{
    if (!bits_per_component)
        return 128ULL * count;
    return header_bits + 2ULL * static_cast<std::uint64_t>(*bits_per_component) * count;
}

QuantizedMeasurements quantize_measurements(std::span<const Complex> values, std::optional<int> bits_per_component)
{
    check_bits(bits_per_component);
    QuantizedMeasurements q;
    q.bits_per_component = bits_per_component;
    q.count = values.size();
    BitWriter writer;

    if (!bits_per_component)
    {
        for (const auto& v : values)
        {
            writer.put(std::bit_cast<std::uint64_t>(v.real()), 64);
            writer.put(std::bit_cast<std::uint64_t>(v.imag()), 64);
        }
        q.values.assign(values.begin(), values.end());
        q.bit_count = QuantizedMeasurements::bits_for(values.size(), std::nullopt);
        q.packed = writer.take();
        return q;
    }

    const int bits = *bits_per_component;
    double peak = 0.0;
    for (const auto& v : values)
        peak = std::max({peak, std::abs(v.real()), std::abs(v.imag())});
    int exponent = -127;
    if (peak > 0.0)
        exponent = std::clamp(static_cast<int>(std::ceil(std::log2(peak))), -127, 127);
    // log2 rounding can leave the scale a hair below the peak.
    while (exponent < 127 && std::ldexp(1.0, exponent) < peak)
        ++exponent;
    q.exponent = exponent;

    const double step = step_for(exponent, bits);
    const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
    const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;

    writer.put(static_cast<std::uint8_t>(static_cast<std::int8_t>(exponent)), static_cast<int>(q.header_bits));
    q.values.reserve(values.size());
    auto encode = [&](double x) {
        const auto idx = std::clamp(static_cast<std::int64_t>(std::floor(x / step)), lo, hi);
        writer.put(static_cast<std::uint64_t>(idx - lo), bits);
        return (static_cast<double>(idx) + 0.5) * step;
    };
    for (const auto& v : values)
    {
        const double re = encode(v.real());
        const double im = encode(v.imag());
        q.values.emplace_back(re, im);
    }
    q.bit_count = QuantizedMeasurements::bits_for(values.size(), bits);
    q.packed = writer.take();
    return q;
}

ComplexVector dequantize_measurements(std::span<const std::uint8_t> packed, std::size_t count,
                                      std::optional<int> bits_per_component)
{
    check_bits(bits_per_component);
    BitReader reader(packed);
    ComplexVector out;
    out.reserve(count);
    if (!bits_per_component)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            const double re = std::bit_cast<double>(reader.get(64));
            const double im = std::bit_cast<double>(reader.get(64));
            out.emplace_back(re, im);
        }
        return out;
    }
    const int bits = *bits_per_component;
    const int exponent = static_cast<std::int8_t>(static_cast<std::uint8_t>(reader.get(8)));
    const double step = step_for(exponent, bits);
    const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
    for (std::size_t i = 0; i < count; ++i)
    {
        const double re = (static_cast<double>(static_cast<std::int64_t>(reader.get(bits)) + lo) + 0.5) * step;
        const double im = (static_cast<double>(static_cast<std::int64_t>(reader.get(bits)) + lo) + 0.5) * step;
        out.emplace_back(re, im);
    }
    return out;
}

} // namespace cssound
