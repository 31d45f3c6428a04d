#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace eblp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin singular value decomposition `a ~= left * diag(values) * right^T`,
/// singular values sorted in decreasing order.
struct Svd {
    Vector values;
    Matrix left;   // rows(a) x k
    Matrix right;  // cols(a) x k
};

/// Full thin SVD (all min(n, p) singular values).
Svd full_svd(const Matrix& a);

/// Singular values only, all min(n, p) of them, in decreasing order.
Vector singular_values(const Matrix& a);

struct TruncatedSvdOptions {
    Index oversample = 10;
    /// Minimum number of power iterations.
    int power_iters = 6;
    /// Keep iterating until no top-k value at or above `converge_floor` moves by
    /// more than tol * s_1 in one iteration (tol = 0 disables). Past
    /// max_power_iters the exact full decomposition is used instead.
    double tol = 1e-10;
    double converge_floor = 0.0;
    int max_power_iters = 30;
    std::uint64_t seed = 0x5eed;
};

/// Top-k singular triplets by randomized subspace iteration.
///
/// `start`, when non-empty (cols(a) x m), seeds the right subspace instead of a
/// Gaussian test matrix; used for warm starts inside iterative solvers.
/// `basis_out`, when given, receives the full oversampled right basis, a good
/// `start` for the next call on a nearby matrix.
Svd truncated_svd(const Matrix& a, Index k, const TruncatedSvdOptions& opts = {},
                  const Matrix& start = Matrix(), Matrix* basis_out = nullptr);

}  // namespace eblp
