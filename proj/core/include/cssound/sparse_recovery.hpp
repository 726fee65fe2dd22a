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

#ifndef CSSOUND_SPARSE_RECOVERY_HPP
#define CSSOUND_SPARSE_RECOVERY_HPP

#include "cssound/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cssound {

class InsufficientMeasurements : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the restricted least-squares system stays rank deficient after the retry.
class DegenerateSupport : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Row-sampled measurement matrix Phi (n_kappa x n).
///
/// Built either from explicit dense rows or from row indices into the
/// Kronecker DFT system F_ndft (x) F_ns. Kronecker rows are regenerated from
/// their index with kron_row, so the same index always yields the same bits.
class MeasurementOperator
{
public:
    static MeasurementOperator from_dense(ComplexMatrix phi);
    static MeasurementOperator from_kron_rows(KronDims dims, std::vector<std::size_t> rows);
    /// Rows of the unitary n-point DFT (the one-dimensional case, n_s = 1).
    static MeasurementOperator from_dft_rows(std::size_t n, std::vector<std::size_t> rows);

    std::size_t rows() const noexcept { return phi_.rows(); }
    std::size_t cols() const noexcept { return phi_.cols(); }

    const ComplexMatrix& matrix() const noexcept { return phi_; }
    const std::optional<KronDims>& kron_dims() const noexcept { return dims_; }
    const std::vector<std::size_t>& kron_rows() const noexcept { return row_ids_; }

    /// Phi x.
    ComplexVector apply(std::span<const Complex> x, MacCounter* macs = nullptr) const;
    /// Phi^H r.
    ComplexVector apply_adjoint(std::span<const Complex> r, MacCounter* macs = nullptr) const;
    /// Phi restricted to `support` columns, in the given order.
    ComplexMatrix columns(std::span<const std::size_t> support) const;
    /// Phi_(T) b for b indexed by `support`.
    ComplexVector apply_restricted(std::span<const std::size_t> support, std::span<const Complex> b,
                                   MacCounter* macs = nullptr) const;

private:
    MeasurementOperator(ComplexMatrix phi, std::optional<KronDims> dims, std::vector<std::size_t> rows);

    ComplexMatrix phi_;
    std::optional<KronDims> dims_;
    std::vector<std::size_t> row_ids_;
};

enum class Algorithm
{
    cosamp,
    omp
};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct RecoveryConfig
{
    std::size_t kappa = 1;
    double tau = 1e-6;
    int i_max = 50;
    /// Re-solve least squares on the pruned support before updating the residual.
    bool resolve_after_prune = false;

    /// Throws std::invalid_argument on kappa = 0, tau outside (0, 1) or i_max < 1.
    void validate() const;
};

enum class RecoveryStatus
{
    converged,       ///< residual ratio reached tau
    iteration_limit, ///< stopped by i_max
    stalled,         ///< no admissible atom could be added
    zero_measurement ///< y = 0, nothing to recover
};

std::string_view to_string(RecoveryStatus s);

struct SparseRecoveryResult
{
    ComplexVector x_hat;
    std::vector<std::size_t> support; ///< ascending
    std::vector<double> residual_history; ///< |r|/|y|, first entry is the starting residual
    int iterations = 0;
    std::uint64_t mac_count = 0;
    RecoveryStatus status = RecoveryStatus::iteration_limit;
    int degenerate_retries = 0;

    bool converged() const noexcept
    {
        return status == RecoveryStatus::converged || status == RecoveryStatus::zero_measurement;
    }
    double final_residual() const noexcept { return residual_history.back(); }

    bool operator==(const SparseRecoveryResult&) const = default;
};

/// Indices of the `count` largest |u[i]|, ties to the lowest index, returned ascending.
std::vector<std::size_t> support_select(std::span<const Complex> u, std::size_t count);

/// Closed-form per-iteration complex-MAC estimate:
/// n*n_kappa + n_kappa*(2k) + n_kappa*(2k)^2 + (2k)^3.
std::uint64_t mac_model(std::uint64_t n, std::uint64_t n_kappa, std::uint64_t kappa);

SparseRecoveryResult cosamp(const MeasurementOperator& phi, std::span<const Complex> y, const RecoveryConfig& cfg);
SparseRecoveryResult omp(const MeasurementOperator& phi, std::span<const Complex> y, const RecoveryConfig& cfg);

SparseRecoveryResult recover(Algorithm algorithm, const MeasurementOperator& phi, std::span<const Complex> y,
                             const RecoveryConfig& cfg);

} // namespace cssound

#endif // CSSOUND_SPARSE_RECOVERY_HPP
