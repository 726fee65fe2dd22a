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

#include "cssound/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

namespace cssound {

// ----- MeasurementOperator ---------------------------------------------------

MeasurementOperator::MeasurementOperator(ComplexMatrix phi, std::optional<KronDims> dims,
                                         std::vector<std::size_t> rows)
    : phi_(std::move(phi)), dims_(dims), row_ids_(std::move(rows))
{
    if (phi_.rows() > phi_.cols())
        throw std::invalid_argument("MeasurementOperator: more rows than columns");
}

MeasurementOperator MeasurementOperator::from_dense(ComplexMatrix phi)
{
    return MeasurementOperator(std::move(phi), std::nullopt, {});
}

MeasurementOperator MeasurementOperator::from_kron_rows(KronDims dims, std::vector<std::size_t> rows)
{
    if (rows.empty())
        throw std::invalid_argument("MeasurementOperator: no rows selected");
    std::unordered_set<std::size_t> seen;
    for (auto r : rows)
    {
        if (r >= dims.size())
            throw std::out_of_range("MeasurementOperator: row index " + std::to_string(r) + " out of range");
        if (!seen.insert(r).second)
            throw std::invalid_argument("MeasurementOperator: duplicate row index " + std::to_string(r));
    }
    ComplexMatrix phi(rows.size(), dims.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        kron_row_into(dims, rows[i], phi.row(i));
    return MeasurementOperator(std::move(phi), dims, std::move(rows));
}

MeasurementOperator MeasurementOperator::from_dft_rows(std::size_t n, std::vector<std::size_t> rows)
{
    return from_kron_rows(KronDims{n, 1}, std::move(rows));
}

ComplexVector MeasurementOperator::apply(std::span<const Complex> x, MacCounter* macs) const
{
    if (macs)
        macs->add(static_cast<std::uint64_t>(rows()) * cols());
    return phi_ * x;
}

ComplexVector MeasurementOperator::apply_adjoint(std::span<const Complex> r, MacCounter* macs) const
{
    return adjoint_apply(phi_, r, macs);
}

ComplexMatrix MeasurementOperator::columns(std::span<const std::size_t> support) const
{
    ComplexMatrix out(rows(), support.size());
    for (std::size_t i = 0; i < rows(); ++i)
    {
        const auto src = phi_.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < support.size(); ++j)
            dst[j] = src[support[j]];
    }
    return out;
}

ComplexVector MeasurementOperator::apply_restricted(std::span<const std::size_t> support,
                                                    std::span<const Complex> b, MacCounter* macs) const
{
    if (support.size() != b.size())
        throw std::invalid_argument("apply_restricted: support and coefficient lengths differ");
    ComplexVector out(rows());
    for (std::size_t i = 0; i < rows(); ++i)
    {
        const auto row = phi_.row(i);
        Complex acc = 0.0;
        for (std::size_t j = 0; j < support.size(); ++j)
            acc += row[support[j]] * b[j];
        out[i] = acc;
    }
    if (macs)
        macs->add(static_cast<std::uint64_t>(rows()) * support.size());
    return out;
}

// ----- Config / enums --------------------------------------------------------

std::string_view to_string(Algorithm a)
{
    return a == Algorithm::cosamp ? "cosamp" : "omp";
}

Algorithm parse_algorithm(std::string_view s)
{
    if (s == "cosamp")
        return Algorithm::cosamp;
    if (s == "omp")
        return Algorithm::omp;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "' (expected cosamp or omp)");
}

std::string_view to_string(RecoveryStatus s)
{
    switch (s)
    {
    case RecoveryStatus::converged: return "converged";
    case RecoveryStatus::iteration_limit: return "iteration_limit";
    case RecoveryStatus::stalled: return "stalled";
    case RecoveryStatus::zero_measurement: return "zero_measurement";
    }
    return "unknown";
}

void RecoveryConfig::validate() const
{
    if (kappa < 1)
        throw std::invalid_argument("recovery.kappa must be >= 1");
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("recovery.tau must lie in (0, 1)");
    if (i_max < 1)
        throw std::invalid_argument("recovery.i_max must be >= 1");
}

// ----- Kernels ---------------------------------------------------------------

std::vector<std::size_t> support_select(std::span<const Complex> u, std::size_t count)
{
    if (count > u.size())
        throw std::invalid_argument("support_select: count exceeds vector length");
    std::vector<std::size_t> idx(u.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto larger = [&](std::size_t a, std::size_t b) {
        const double ma = std::norm(u[a]);
        const double mb = std::norm(u[b]);
        return ma > mb || (ma == mb && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), larger);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::uint64_t mac_model(std::uint64_t n, std::uint64_t n_kappa, std::uint64_t kappa)
{
    if (n == 0 || n_kappa == 0 || kappa == 0)
        throw std::invalid_argument("mac_model: arguments must be positive");
    const std::uint64_t k2 = 2 * kappa;
    return n * n_kappa + n_kappa * k2 + n_kappa * k2 * k2 + k2 * k2 * k2;
}

namespace {

void check_inputs(const MeasurementOperator& phi, std::span<const Complex> y, const RecoveryConfig& cfg)
{
    cfg.validate();
    if (y.size() != phi.rows())
        throw std::invalid_argument("recovery: measurement length does not match operator rows");
    if (2 * cfg.kappa > phi.rows())
        throw InsufficientMeasurements("recovery: 2*kappa = " + std::to_string(2 * cfg.kappa) +
                                       " exceeds the " + std::to_string(phi.rows()) + " measurements");
}

std::vector<std::size_t> merge_sorted(std::span<const std::size_t> a, std::span<const std::size_t> b)
{
    std::vector<std::size_t> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

ComplexVector least_squares(const MeasurementOperator& phi, std::span<const std::size_t> support,
                            std::span<const Complex> y, MacCounter& macs)
{
    if (support.size() > phi.rows())
        throw NotPositiveDefinite(phi.rows(), 0.0);
    return solve_normal_equations(phi.columns(support), y, &macs);
}

SparseRecoveryResult zero_result(std::size_t n)
{
    SparseRecoveryResult res;
    res.x_hat.assign(n, Complex{});
    res.residual_history = {0.0};
    res.status = RecoveryStatus::zero_measurement;
    return res;
}

} // namespace

SparseRecoveryResult cosamp(const MeasurementOperator& phi, std::span<const Complex> y, const RecoveryConfig& cfg)
{
    check_inputs(phi, y, cfg);
    const std::size_t n = phi.cols();
    const double y_norm = norm(y);
    if (y_norm == 0.0)
        return zero_result(n);

    SparseRecoveryResult res;
    res.x_hat.assign(n, Complex{});
    res.residual_history.push_back(1.0);
    MacCounter macs;

    ComplexVector r(y.begin(), y.end());
    std::vector<std::size_t> support;
    ComplexVector coeffs;
    double ratio = 1.0;
    const std::size_t proxy_count = std::min(2 * cfg.kappa, n);

    while (res.iterations < cfg.i_max && ratio > cfg.tau)
    {
        const ComplexVector u = phi.apply_adjoint(r, &macs);

        std::vector<std::size_t> merged = merge_sorted(support, support_select(u, proxy_count));
        ComplexVector b;
        try
        {
            b = least_squares(phi, merged, y, macs);
        }
        catch (const NotPositiveDefinite&)
        {
            // Retry with half as many new atoms before giving up.
            ++res.degenerate_retries;
            merged = merge_sorted(support, support_select(u, std::max<std::size_t>(proxy_count / 2, 1)));
            try
            {
                b = least_squares(phi, merged, y, macs);
            }
            catch (const NotPositiveDefinite& e)
            {
                throw DegenerateSupport(std::string("cosamp: restricted least squares is rank deficient (") +
                                        e.what() + ")");
            }
        }

        // Prune to the kappa largest least-squares coefficients.
        const auto keep = support_select(b, std::min(cfg.kappa, b.size()));
        std::vector<std::size_t> pruned(keep.size());
        ComplexVector pruned_coeffs(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
        {
            pruned[i] = merged[keep[i]];
            pruned_coeffs[i] = b[keep[i]];
        }
        if (cfg.resolve_after_prune)
            pruned_coeffs = least_squares(phi, pruned, y, macs);

        const bool fixed_point = pruned == support && pruned_coeffs == coeffs;
        support = std::move(pruned);
        coeffs = std::move(pruned_coeffs);

        std::fill(res.x_hat.begin(), res.x_hat.end(), Complex{});
        for (std::size_t i = 0; i < support.size(); ++i)
            res.x_hat[support[i]] = coeffs[i];

        const ComplexVector fit = phi.apply_restricted(support, coeffs, &macs);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = y[i] - fit[i];
        ratio = norm(r) / y_norm;
        res.residual_history.push_back(ratio);
        ++res.iterations;

        // Identical support and coefficients reproduce the same iterate forever.
        if (fixed_point && ratio > cfg.tau)
        {
            res.status = RecoveryStatus::stalled;
            break;
        }
    }

    if (ratio <= cfg.tau)
        res.status = RecoveryStatus::converged;
    else if (res.status != RecoveryStatus::stalled)
        res.status = RecoveryStatus::iteration_limit;
    res.support = std::move(support);
    res.mac_count = macs.count;
    return res;
}

SparseRecoveryResult omp(const MeasurementOperator& phi, std::span<const Complex> y, const RecoveryConfig& cfg)
{
    check_inputs(phi, y, cfg);
    const std::size_t n = phi.cols();
    const double y_norm = norm(y);
    if (y_norm == 0.0)
        return zero_result(n);

    double max_col = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
        double c = 0.0;
        for (std::size_t i = 0; i < phi.rows(); ++i)
            c += std::norm(phi.matrix()(i, j));
        max_col = std::max(max_col, c);
    }
    const double floor = 1e-12 * y_norm * std::sqrt(max_col);

    SparseRecoveryResult res;
    res.x_hat.assign(n, Complex{});
    res.residual_history.push_back(1.0);
    MacCounter macs;

    ComplexVector r(y.begin(), y.end());
    std::vector<std::size_t> support;
    ComplexVector coeffs;
    double ratio = 1.0;

    while (res.iterations < cfg.i_max && ratio > cfg.tau)
    {
        if (support.size() == cfg.kappa)
        {
            res.status = RecoveryStatus::stalled;
            break;
        }
        ComplexVector u = phi.apply_adjoint(r, &macs);
        for (auto s : support)
            u[s] = 0.0;
        const std::size_t best = support_select(u, 1).front();
        if (std::abs(u[best]) <= floor)
        {
            res.status = RecoveryStatus::stalled;
            break;
        }

        support.insert(std::upper_bound(support.begin(), support.end(), best), best);
        try
        {
            coeffs = least_squares(phi, support, y, macs);
        }
        catch (const NotPositiveDefinite& e)
        {
            throw DegenerateSupport(std::string("omp: restricted least squares is rank deficient (") + e.what() +
                                    ")");
        }

        std::fill(res.x_hat.begin(), res.x_hat.end(), Complex{});
        for (std::size_t i = 0; i < support.size(); ++i)
            res.x_hat[support[i]] = coeffs[i];

        const ComplexVector fit = phi.apply_restricted(support, coeffs, &macs);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = y[i] - fit[i];
        ratio = norm(r) / y_norm;
        res.residual_history.push_back(ratio);
        ++res.iterations;
    }

    if (ratio <= cfg.tau)
        res.status = RecoveryStatus::converged;
    else if (res.status != RecoveryStatus::stalled)
        res.status = RecoveryStatus::iteration_limit;
    res.support = std::move(support);
    res.mac_count = macs.count;
    return res;
}

SparseRecoveryResult recover(Algorithm algorithm, const MeasurementOperator& phi, std::span<const Complex> y,
                             const RecoveryConfig& cfg)
{
    return algorithm == Algorithm::cosamp ? cosamp(phi, y, cfg) : omp(phi, y, cfg);
}

} // namespace cssound
