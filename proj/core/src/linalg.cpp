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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cssound {

namespace {
void count(MacCounter* macs, std::uint64_t n)
{
    if (macs)
        macs->add(n);
}
} // namespace

ComplexMatrix gram_matrix(const ComplexMatrix& phi_t, MacCounter* macs)
{
    const std::size_t m = phi_t.cols();
    ComplexMatrix g(m, m);
    for (std::size_t r = 0; r < phi_t.rows(); ++r)
    {
        const auto row = phi_t.row(r);
        for (std::size_t i = 0; i < m; ++i)
        {
            const Complex ci = std::conj(row[i]);
            auto g_row = g.row(i);
            for (std::size_t j = 0; j <= i; ++j)
                g_row[j] += ci * row[j];
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
            g(j, i) = std::conj(g(i, j));
    count(macs, static_cast<std::uint64_t>(phi_t.rows()) * m * (m + 1) / 2);
    return g;
}

ComplexVector adjoint_apply(const ComplexMatrix& phi_t, std::span<const Complex> y, MacCounter* macs)
{
    if (y.size() != phi_t.rows())
        throw std::invalid_argument("adjoint_apply: dimension mismatch");
    ComplexVector out(phi_t.cols());
    for (std::size_t r = 0; r < phi_t.rows(); ++r)
    {
        const auto row = phi_t.row(r);
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += std::conj(row[j]) * y[r];
    }
    count(macs, static_cast<std::uint64_t>(phi_t.rows()) * phi_t.cols());
    return out;
}

ComplexMatrix cholesky(const ComplexMatrix& a, MacCounter* macs)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument("cholesky: matrix must be square");
    const std::size_t n = a.rows();

    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        trace += a(i, i).real();
    const double eps = 1e-12 * trace / static_cast<double>(n);

    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j)
    {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(l(j, k));
        if (!(d > eps))
            throw NotPositiveDefinite(j, d);
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i)
        {
            Complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    const auto n3 = static_cast<std::uint64_t>(n) * n * n;
    count(macs, (n3 + 2) / 3);
    return l;
}

ComplexVector solve_lower(const ComplexMatrix& l, std::span<const Complex> b)
{
    const std::size_t n = l.rows();
    if (l.cols() != n || b.size() != n)
        throw std::invalid_argument("solve_lower: dimension mismatch");
    ComplexVector x(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Complex s = b[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

ComplexVector solve_lower_adjoint(const ComplexMatrix& l, std::span<const Complex> b)
{
    const std::size_t n = l.rows();
    if (l.cols() != n || b.size() != n)
        throw std::invalid_argument("solve_lower_adjoint: dimension mismatch");
    ComplexVector x(n);
    for (std::size_t ii = n; ii-- > 0;)
    {
        Complex s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k)
            s -= std::conj(l(k, ii)) * x[k];
        x[ii] = s / std::conj(l(ii, ii));
    }
    return x;
}

ComplexVector solve_normal_equations(const ComplexMatrix& phi_t, std::span<const Complex> y, MacCounter* macs)
{
    if (phi_t.cols() > phi_t.rows())
        throw std::invalid_argument("solve_normal_equations: more unknowns than equations");
    const ComplexMatrix g = gram_matrix(phi_t, macs);
    const ComplexVector rhs = adjoint_apply(phi_t, y, macs);
    const ComplexMatrix l = cholesky(g, macs);
    const ComplexVector z = solve_lower(l, rhs);
    count(macs, static_cast<std::uint64_t>(l.rows()) * l.rows());
    return solve_lower_adjoint(l, z);
}

// ----- One-sided Jacobi SVD ----------------------------------------------------

namespace {

// Columns of `work` (tall, m >= n) are orthogonalized in place; `v` accumulates the rotations.
int jacobi_sweeps(ComplexMatrix& work, ComplexMatrix& v, int max_sweeps)
{
    const std::size_t m = work.rows();
    const std::size_t n = work.cols();
    constexpr double tol = 1e-15;

    for (int sweep = 1; sweep <= max_sweeps; ++sweep)
    {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
        {
            for (std::size_t q = p + 1; q < n; ++q)
            {
                double alpha = 0.0;
                double beta = 0.0;
                Complex gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                {
                    alpha += std::norm(work(i, p));
                    beta += std::norm(work(i, q));
                    gamma += std::conj(work(i, p)) * work(i, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;

                const Complex phase = gamma / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                // [a_p a_q] <- [a_p a_q] * [[c, s e^{j phi}], [-s e^{-j phi}, c]]
                auto rotate = [&](ComplexMatrix& mat) {
                    for (std::size_t i = 0; i < mat.rows(); ++i)
                    {
                        const Complex ap = mat(i, p);
                        const Complex aq = mat(i, q);
                        mat(i, p) = c * ap - s * std::conj(phase) * aq;
                        mat(i, q) = s * phase * ap + c * aq;
                    }
                };
                rotate(work);
                rotate(v);
            }
        }
        if (!rotated)
            return sweep;
    }
    throw SvdNotConverged("svd_small: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

// Replaces zero columns (flagged in `filled`) with unit vectors orthogonal to the rest.
void complete_orthonormal(ComplexMatrix& u, std::vector<bool> filled)
{
    const std::size_t m = u.rows();
    std::size_t candidate = 0;
    for (std::size_t c = 0; c < u.cols(); ++c)
    {
        if (filled[c])
            continue;
        for (; candidate < m; ++candidate)
        {
            ComplexVector e(m);
            e[candidate] = 1.0;
            // two passes of Gram-Schmidt
            for (int pass = 0; pass < 2; ++pass)
            {
                for (std::size_t k = 0; k < u.cols(); ++k)
                {
                    if (!filled[k])
                        continue;
                    Complex proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i)
                        proj += std::conj(u(i, k)) * e[i];
                    for (std::size_t i = 0; i < m; ++i)
                        e[i] -= proj * u(i, k);
                }
            }
            const double len = norm(e);
            if (len > 1e-6)
            {
                for (std::size_t i = 0; i < m; ++i)
                    u(i, c) = e[i] / len;
                filled[c] = true;
                ++candidate;
                break;
            }
        }
    }
}

} // namespace

Svd svd_small(const ComplexMatrix& a, int max_sweeps)
{
    const bool wide = a.cols() > a.rows();
    ComplexMatrix work = wide ? a.adjoint() : a;
    const std::size_t m = work.rows();
    const std::size_t n = work.cols();

    ComplexMatrix v = ComplexMatrix::identity(n);
    const int sweeps = jacobi_sweeps(work, v, max_sweeps);

    std::vector<double> sigma(n);
    for (std::size_t c = 0; c < n; ++c)
        sigma[c] = norm(work.column(c));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double cutoff = (sigma.empty() ? 0.0 : sigma[order[0]]) * 1e-13;
    ComplexMatrix u_sorted(m, n);
    ComplexMatrix v_sorted(n, n);
    std::vector<double> sigma_sorted(n);
    std::vector<bool> filled(n, false);
    for (std::size_t c = 0; c < n; ++c)
    {
        const std::size_t src = order[c];
        sigma_sorted[c] = sigma[src];
        for (std::size_t i = 0; i < n; ++i)
            v_sorted(i, c) = v(i, src);
        if (sigma[src] > cutoff && sigma[src] > 0.0)
        {
            for (std::size_t i = 0; i < m; ++i)
                u_sorted(i, c) = work(i, src) / sigma[src];
            filled[c] = true;
        }
        else
        {
            sigma_sorted[c] = 0.0;
        }
    }
    complete_orthonormal(u_sorted, filled);

    if (wide)
        return Svd{std::move(v_sorted), std::move(sigma_sorted), std::move(u_sorted), sweeps};
    return Svd{std::move(u_sorted), std::move(sigma_sorted), std::move(v_sorted), sweeps};
}

} // namespace cssound
