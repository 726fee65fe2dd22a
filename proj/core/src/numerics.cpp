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

#include <cmath>
#include <numbers>
#include <string>

namespace cssound {

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot) + " = " +
                         std::to_string(value)),
      pivot_(pivot)
{
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols))
{
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    if (data_.size() != rows * cols)
        throw std::invalid_argument("ComplexMatrix: data size does not match dimensions");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Complex& ComplexMatrix::at(std::size_t r, std::size_t c)
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("ComplexMatrix::at");
    return (*this)(r, c);
}

const Complex& ComplexMatrix::at(std::size_t r, std::size_t c) const
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("ComplexMatrix::at");
    return (*this)(r, c);
}

ComplexVector ComplexMatrix::column(std::size_t c) const
{
    if (c >= cols_)
        throw std::out_of_range("ComplexMatrix::column");
    ComplexVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const Complex> values)
{
    if (c >= cols_ || values.size() != rows_)
        throw std::out_of_range("ComplexMatrix::set_column");
    for (std::size_t r = 0; r < rows_; ++r)
        (*this)(r, c) = values[r];
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out(c, r) = std::conj((*this)(r, c));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const
{
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out(c, r) = (*this)(r, c);
    return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix product: inner dimensions differ");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k)
        {
            const Complex aik = a(i, k);
            const auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x)
{
    if (a.cols() != x.size())
        throw std::invalid_argument("matrix-vector product: dimension mismatch");
    ComplexVector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
        Complex acc = 0.0;
        const auto row = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j)
            acc += row[j] * x[j];
        out[i] = acc;
    }
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix difference: dimension mismatch");
    ComplexMatrix out = a;
    auto d = out.data();
    auto s = b.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] -= s[i];
    return out;
}

double squared_norm(std::span<const Complex> v)
{
    double acc = 0.0;
    for (const auto& x : v)
        acc += std::norm(x);
    return acc;
}

double norm(std::span<const Complex> v) { return std::sqrt(squared_norm(v)); }

double norm(const ComplexMatrix& a) { return norm(a.data()); }

double max_abs(const ComplexMatrix& a)
{
    double m = 0.0;
    for (const auto& x : a.data())
        m = std::max(m, std::abs(x));
    return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

namespace {

// exp(-j 2 pi idx / n) for idx already reduced modulo n.
Complex twiddle(std::size_t idx, std::size_t n)
{
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

// Row `k` of the unnormalized n-point DFT.
void dft_row(std::size_t k, std::size_t n, std::span<Complex> out)
{
    for (std::size_t m = 0; m < n; ++m)
        out[m] = twiddle((k * m) % n, n);
}

} // namespace

ComplexMatrix dft_matrix(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("dft_matrix: size must be positive");
    ComplexMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m)
            f(k, m) = twiddle((k * m) % n, n) * scale;
    return f;
}

void kron_row_into(KronDims dims, std::size_t row_index, std::span<Complex> out)
{
    if (dims.n_dft == 0 || dims.n_s == 0)
        throw std::invalid_argument("kron_row: dimensions must be positive");
    if (row_index >= dims.size())
        throw std::out_of_range("kron_row: row index " + std::to_string(row_index) + " out of range");
    if (out.size() != dims.size())
        throw std::invalid_argument("kron_row: output length mismatch");

    const std::size_t k = row_index / dims.n_s;
    const std::size_t s = row_index % dims.n_s;

    std::vector<Complex> tone(dims.n_dft);
    std::vector<Complex> spatial(dims.n_s);
    dft_row(k, dims.n_dft, tone);
    dft_row(s, dims.n_s, spatial);

    const double scale = 1.0 / std::sqrt(static_cast<double>(dims.n_dft) * static_cast<double>(dims.n_s));
    for (std::size_t n = 0; n < dims.n_dft; ++n)
    {
        const Complex t = tone[n] * scale;
        for (std::size_t v = 0; v < dims.n_s; ++v)
            out[n * dims.n_s + v] = t * spatial[v];
    }
}

ComplexVector kron_row(KronDims dims, std::size_t row_index)
{
    ComplexVector out(dims.size());
    kron_row_into(dims, row_index, out);
    return out;
}

} // namespace cssound
