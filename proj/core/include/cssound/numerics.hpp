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

#ifndef CSSOUND_NUMERICS_HPP
#define CSSOUND_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cssound {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// ----- Errors ---------------------------------------------------------------

class NotPositiveDefinite : public std::runtime_error
{
public:
    NotPositiveDefinite(std::size_t pivot, double value);
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class SvdNotConverged : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// ----- Dense complex matrix -------------------------------------------------

/// Row-major dense complex matrix. Both dimensions are strictly positive.
class ComplexMatrix
{
public:
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    /// Bounds-checked access.
    Complex& at(std::size_t r, std::size_t c);
    const Complex& at(std::size_t r, std::size_t c) const;

    std::span<Complex> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const Complex> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    ComplexVector column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const Complex> values);

    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius norm.
double norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);

double norm(std::span<const Complex> v);
double squared_norm(std::span<const Complex> v);

/// Dense Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// ----- DFT ------------------------------------------------------------------

/// Unitary DFT matrix, F[k, m] = exp(-j 2 pi k m / n) / sqrt(n).
ComplexMatrix dft_matrix(std::size_t n);

/// Unitary forward transform; radix-2 for powers of two, direct DFT otherwise.
ComplexVector fft(std::span<const Complex> v);
ComplexVector ifft(std::span<const Complex> v);

/// F_rows * h * F_cols with unitary factors; the tone axis runs down the rows.
ComplexMatrix fft2d(const ComplexMatrix& h);
/// F_rows^H * H * F_cols^H.
ComplexMatrix ifft2d(const ComplexMatrix& freq);

/// Column-wise transform along the row axis.
ComplexMatrix fft_columns(const ComplexMatrix& m);
ComplexMatrix ifft_columns(const ComplexMatrix& m);
/// Row-wise transform along the column axis.
ComplexMatrix fft_rows(const ComplexMatrix& m);
ComplexMatrix ifft_rows(const ComplexMatrix& m);

/// Dimensions of the two-factor DFT Kronecker system.
struct KronDims
{
    std::size_t n_dft = 1;
    std::size_t n_s = 1;

    std::size_t size() const noexcept { return n_dft * n_s; }
    bool operator==(const KronDims&) const = default;
};

/// Row `row_index` of (F_ndft (x) F_ns) without forming the full matrix.
/// Row k*n_s + s, column n*n_s + v holds F_ndft[k, n] * F_ns[s, v].
ComplexVector kron_row(KronDims dims, std::size_t row_index);

/// Writes kron_row into `out` (length dims.size()). Reuses the caller's storage.
void kron_row_into(KronDims dims, std::size_t row_index, std::span<Complex> out);

// ----- Factorizations and solvers -------------------------------------------

/// Tally of complex multiply-accumulates executed by the instrumented kernels.
struct MacCounter
{
    std::uint64_t count = 0;
    void add(std::uint64_t n) noexcept { count += n; }
};

/// Lower triangle (and mirrored upper) of phi_t^H phi_t.
ComplexMatrix gram_matrix(const ComplexMatrix& phi_t, MacCounter* macs = nullptr);
/// phi_t^H y.
ComplexVector adjoint_apply(const ComplexMatrix& phi_t, std::span<const Complex> y, MacCounter* macs = nullptr);

/// Lower-triangular L with real positive diagonal such that L L^H = a.
/// Throws NotPositiveDefinite when a pivot falls below 1e-12 * trace / n.
ComplexMatrix cholesky(const ComplexMatrix& a, MacCounter* macs = nullptr);

/// Solves L x = b for lower-triangular L.
ComplexVector solve_lower(const ComplexMatrix& l, std::span<const Complex> b);
/// Solves L^H x = b for lower-triangular L.
ComplexVector solve_lower_adjoint(const ComplexMatrix& l, std::span<const Complex> b);

/// Least squares via the Gram matrix, its Cholesky factor and two triangular solves.
ComplexVector solve_normal_equations(const ComplexMatrix& phi_t, std::span<const Complex> y,
                                     MacCounter* macs = nullptr);

struct Svd
{
    ComplexMatrix u;              ///< rows x k, orthonormal columns
    std::vector<double> sigma;    ///< k values, descending, non-negative
    ComplexMatrix v;              ///< cols x k, orthonormal columns
    int sweeps = 0;
};

/// Thin SVD (k = min(rows, cols)) by one-sided Jacobi. Intended for matrices up to 16x16.
Svd svd_small(const ComplexMatrix& a, int max_sweeps = 100);

} // namespace cssound

#endif // CSSOUND_NUMERICS_HPP
