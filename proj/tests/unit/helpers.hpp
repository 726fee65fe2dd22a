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

#ifndef CSSOUND_TEST_HELPERS_HPP
#define CSSOUND_TEST_HELPERS_HPP

#include "cssound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

using cssound::Complex;
using cssound::ComplexMatrix;
using cssound::ComplexVector;

inline ComplexVector random_vector(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (auto& x : v)
    {
        const double re = g(rng);
        const double im = g(rng);
        x = {re, im};
    }
    return v;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng)
{
    return ComplexMatrix(rows, cols, random_vector(rows * cols, rng));
}

/// Direct summation DFT, written out independently of the library.
inline ComplexVector naive_dft(const ComplexVector& x, bool inverse = false)
{
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    ComplexVector out(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        Complex acc = 0.0;
        for (std::size_t m = 0; m < n; ++m)
            acc += x[m] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double((k * m) % n) / double(n));
        out[k] = acc / std::sqrt(double(n));
    }
    return out;
}

inline ComplexMatrix naive_dft_matrix(std::size_t n)
{
    ComplexMatrix f(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m)
            f(k, m) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * std::numbers::pi * double((k * m) % n) / double(n));
    return f;
}

inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
        {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

inline ComplexMatrix naive_adjoint(const ComplexMatrix& a)
{
    ComplexMatrix h(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            h(j, i) = std::conj(a(i, j));
    return h;
}

/// Gauss-Jordan inverse with partial pivoting.
inline ComplexMatrix naive_inverse(ComplexMatrix a)
{
    const std::size_t n = a.rows();
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(p, c)))
                p = r;
        for (std::size_t j = 0; j < n; ++j)
        {
            std::swap(a(c, j), a(p, j));
            std::swap(inv(c, j), inv(p, j));
        }
        const Complex d = a(c, c);
        for (std::size_t j = 0; j < n; ++j)
        {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r)
        {
            if (r == c)
                continue;
            const Complex f = a(r, c);
            for (std::size_t j = 0; j < n; ++j)
            {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// (A^H A)^-1 A^H y.
inline ComplexVector pinv_solve(const ComplexMatrix& a, const ComplexVector& y)
{
    const ComplexMatrix ah = naive_adjoint(a);
    const ComplexMatrix g = naive_inverse(naive_matmul(ah, a));
    const ComplexMatrix yc(y.size(), 1, y);
    const ComplexMatrix x = naive_matmul(g, naive_matmul(ah, yc));
    return ComplexVector(x.data().begin(), x.data().end());
}

inline double max_diff(std::span<const Complex> a, std::span<const Complex> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_error(std::span<const Complex> est, std::span<const Complex> truth)
{
    double e = 0.0;
    double n = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        e += std::norm(est[i] - truth[i]);
        n += std::norm(truth[i]);
    }
    return std::sqrt(e / n);
}

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Spearman rank correlation; ties get average ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();)
        {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            for (std::size_t k = i; k <= j; ++k)
                r[idx[k]] = 0.5 * double(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace testing

#endif // CSSOUND_TEST_HELPERS_HPP
