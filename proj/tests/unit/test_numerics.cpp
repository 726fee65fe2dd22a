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

#include "helpers.hpp"

#include "cssound/numerics.hpp"

#include <doctest.h>

using namespace cssound;
using namespace testing;

TEST_SUITE("numerics")
{
TEST_CASE("fft matches direct summation")
{
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 4u, 8u, 12u, 52u, 64u, 256u})
    {
        CAPTURE(n);
        const auto x = random_vector(n, rng);
        CHECK(max_diff(fft(x), naive_dft(x)) < 1e-12);
        CHECK(max_diff(ifft(x), naive_dft(x, true)) < 1e-12);
        CHECK(max_diff(ifft(fft(x)), x) < 1e-12);
    }
}

TEST_CASE("fft is unitary")
{
    std::mt19937_64 rng(12);
    const auto x = random_vector(128, rng);
    CHECK(std::abs(norm(fft(x)) - norm(x)) < 1e-12);
}

TEST_CASE("dft_matrix is unitary and matches the closed form")
{
    for (std::size_t n : {1u, 3u, 8u, 16u})
    {
        const auto f = dft_matrix(n);
        CHECK(max_abs(f - naive_dft_matrix(n)) < 1e-14);
        CHECK(max_abs(naive_matmul(f, naive_adjoint(f)) - ComplexMatrix::identity(n)) < 1e-13);
    }
}

TEST_CASE("fft2d equals F h F with dense matrices")
{
    std::mt19937_64 rng(13);
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{8, 2}, {16, 8}, {12, 3}})
    {
        const auto h = random_matrix(r, c, rng);
        const auto oracle = naive_matmul(naive_matmul(naive_dft_matrix(r), h), naive_dft_matrix(c));
        CHECK(max_abs(fft2d(h) - oracle) < 1e-12);
        CHECK(max_abs(ifft2d(fft2d(h)) - h) < 1e-12);
    }
}

TEST_CASE("row and column transforms")
{
    std::mt19937_64 rng(14);
    const auto h = random_matrix(16, 4, rng);
    CHECK(max_abs(fft_columns(h) - naive_matmul(naive_dft_matrix(16), h)) < 1e-12);
    CHECK(max_abs(fft_rows(h) - naive_matmul(h, naive_dft_matrix(4))) < 1e-12);
    CHECK(max_abs(ifft_columns(fft_columns(h)) - h) < 1e-12);
    CHECK(max_abs(ifft_rows(fft_rows(h)) - h) < 1e-12);
}

TEST_CASE("kron matches the element formula")
{
    std::mt19937_64 rng(15);
    const auto a = random_matrix(3, 2, rng);
    const auto b = random_matrix(2, 4, rng);
    const auto k = kron(a, b);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.cols() == 8);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(k(i, j) == a(i / 2, j / 4) * b(i % 2, j % 4));
}

TEST_CASE("kron_row equals rows of the dense Kronecker DFT")
{
    const KronDims dims{16, 4};
    const auto dense = kron(naive_dft_matrix(16), naive_dft_matrix(4));
    for (std::size_t r = 0; r < dims.size(); ++r)
    {
        const auto row = kron_row(dims, r);
        CHECK(max_diff(row, dense.row(r)) < 1e-13);
    }
    // reproducible bit for bit from the index alone
    CHECK(kron_row(dims, 37) == kron_row(dims, 37));
}

TEST_CASE("matrix basics")
{
    CHECK_THROWS_AS(ComplexMatrix(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, ComplexVector(3)), std::invalid_argument);
    ComplexMatrix m(2, 3);
    CHECK_THROWS_AS(m.at(2, 0), std::out_of_range);
    m(1, 2) = {1.0, 2.0};
    CHECK(m.adjoint()(2, 1) == Complex(1.0, -2.0));
    CHECK(m.transpose()(2, 1) == Complex(1.0, 2.0));
    CHECK(m.column(2)[1] == Complex(1.0, 2.0));
}

TEST_CASE("cholesky reproduces a Hermitian positive definite matrix")
{
    std::mt19937_64 rng(16);
    const auto a = random_matrix(12, 6, rng);
    const auto g = naive_matmul(naive_adjoint(a), a);
    const auto l = cholesky(g);
    for (std::size_t i = 0; i < 6; ++i)
    {
        CHECK(l(i, i).imag() == 0.0);
        CHECK(l(i, i).real() > 0.0);
        for (std::size_t j = i + 1; j < 6; ++j)
            CHECK(l(i, j) == Complex{});
    }
    CHECK(max_abs(naive_matmul(l, naive_adjoint(l)) - g) < 1e-10);
}

TEST_CASE("cholesky rejects a singular matrix")
{
    ComplexMatrix g(2, 2, {1.0, 1.0, 1.0, 1.0});
    try
    {
        cholesky(g);
        FAIL("expected NotPositiveDefinite");
    }
    catch (const NotPositiveDefinite& e)
    {
        CHECK(e.pivot() == 1);
    }
}

TEST_CASE("triangular solves")
{
    std::mt19937_64 rng(17);
    const auto a = random_matrix(10, 5, rng);
    const auto l = cholesky(naive_matmul(naive_adjoint(a), a));
    const auto b = random_vector(5, rng);
    const auto x = solve_lower(l, b);
    CHECK(max_diff(l * std::span<const Complex>(x), b) < 1e-10);
    const auto z = solve_lower_adjoint(l, b);
    CHECK(max_diff(naive_adjoint(l) * std::span<const Complex>(z), b) < 1e-10);
}

TEST_CASE("normal equations match the pseudo-inverse oracle")
{
    std::mt19937_64 rng(18);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{20, 5}, {40, 30}, {8, 1}})
    {
        const auto a = random_matrix(m, n, rng);
        const auto y = random_vector(m, rng);
        CHECK(max_diff(solve_normal_equations(a, y), pinv_solve(a, y)) < 1e-9);
    }
}

TEST_CASE("instrumented kernels count multiply-accumulates")
{
    std::mt19937_64 rng(19);
    const auto a = random_matrix(30, 7, rng);
    MacCounter g;
    gram_matrix(a, &g);
    CHECK(g.count == 30u * 7 * 8 / 2);
    MacCounter adj;
    adjoint_apply(a, random_vector(30, rng), &adj);
    CHECK(adj.count == 30u * 7);
    MacCounter ch;
    cholesky(naive_matmul(naive_adjoint(a), a), &ch);
    CHECK(ch.count == (7u * 7 * 7 + 2) / 3);
}

TEST_CASE("svd_small on 2x2 matches the closed-form singular values")
{
    std::mt19937_64 rng(20);
    for (int t = 0; t < 20; ++t)
    {
        const auto a = random_matrix(2, 2, rng);
        const auto g = naive_matmul(naive_adjoint(a), a);
        // eigenvalues of a 2x2 Hermitian matrix
        const double tr = (g(0, 0) + g(1, 1)).real();
        const double det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        const auto s = svd_small(a);
        CHECK(s.sigma[0] == doctest::Approx(std::sqrt(tr / 2 + disc)).epsilon(1e-10));
        CHECK(s.sigma[1] == doctest::Approx(std::sqrt(std::max(0.0, tr / 2 - disc))).epsilon(1e-8));
    }
}

TEST_CASE("svd_small reconstructs tall, wide and rank-deficient inputs")
{
    std::mt19937_64 rng(21);
    auto check = [](const ComplexMatrix& a) {
        const auto s = svd_small(a);
        const std::size_t k = s.sigma.size();
        CHECK(k == std::min(a.rows(), a.cols()));
        CHECK(std::is_sorted(s.sigma.rbegin(), s.sigma.rend()));
        ComplexMatrix us = s.u;
        for (std::size_t i = 0; i < us.rows(); ++i)
            for (std::size_t j = 0; j < k; ++j)
                us(i, j) *= s.sigma[j];
        CHECK(max_abs(naive_matmul(us, naive_adjoint(s.v)) - a) < 1e-10);
        CHECK(max_abs(naive_matmul(naive_adjoint(s.u), s.u) - ComplexMatrix::identity(k)) < 1e-10);
        CHECK(max_abs(naive_matmul(naive_adjoint(s.v), s.v) - ComplexMatrix::identity(k)) < 1e-10);
    };
    check(random_matrix(8, 3, rng));
    check(random_matrix(3, 8, rng));
    check(random_matrix(16, 16, rng));
    const auto x = random_matrix(6, 1, rng);
    const auto y = random_matrix(1, 4, rng);
    check(naive_matmul(x, y));
}
}
