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

#include "cssound/numerics.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace cssound {
namespace {

// In-place iterative radix-2 transform, unnormalized. sign = -1 forward, +1 inverse.
void radix2(std::span<Complex> a, int sign)
{
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i)
    {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }

    // Twiddles come from a single table indexed by k * (n / len) so every stage
    // reuses exactly the same values.
    std::vector<Complex> table(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
    {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        table[k] = {std::cos(angle), std::sin(angle)};
    }

    for (std::size_t len = 2; len <= n; len <<= 1)
    {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len)
        {
            for (std::size_t k = 0; k < half; ++k)
            {
                const Complex w = table[k * stride];
                const Complex even = a[start + k];
                const Complex odd = a[start + k + half] * w;
                a[start + k] = even + odd;
                a[start + k + half] = even - odd;
            }
        }
    }
}

ComplexVector direct_dft(std::span<const Complex> v, int sign)
{
    const std::size_t n = v.size();
    ComplexVector out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        Complex acc = 0.0;
        for (std::size_t m = 0; m < n; ++m)
        {
            const double angle =
                sign * 2.0 * std::numbers::pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
            acc += v[m] * Complex(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

ComplexVector transform(std::span<const Complex> v, int sign)
{
    const std::size_t n = v.size();
    if (n == 0)
        return {};
    ComplexVector out;
    if (std::has_single_bit(n))
    {
        out.assign(v.begin(), v.end());
        radix2(out, sign);
    }
    else
    {
        out = direct_dft(v, sign);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : out)
        x *= scale;
    return out;
}

} // namespace

ComplexVector fft(std::span<const Complex> v) { return transform(v, -1); }

ComplexVector ifft(std::span<const Complex> v) { return transform(v, +1); }

ComplexMatrix fft_columns(const ComplexMatrix& m)
{
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        out.set_column(c, fft(m.column(c)));
    return out;
}

ComplexMatrix ifft_columns(const ComplexMatrix& m)
{
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        out.set_column(c, ifft(m.column(c)));
    return out;
}

ComplexMatrix fft_rows(const ComplexMatrix& m)
{
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
    {
        const auto t = fft(m.row(r));
        std::copy(t.begin(), t.end(), out.row(r).begin());
    }
    return out;
}

ComplexMatrix ifft_rows(const ComplexMatrix& m)
{
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
    {
        const auto t = ifft(m.row(r));
        std::copy(t.begin(), t.end(), out.row(r).begin());
    }
    return out;
}

// The DFT matrix is symmetric, so right-multiplying by F is a row-wise transform.
ComplexMatrix fft2d(const ComplexMatrix& h) { return fft_rows(fft_columns(h)); }

ComplexMatrix ifft2d(const ComplexMatrix& freq) { return ifft_rows(ifft_columns(freq)); }

} // namespace cssound
