#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "eblp/linalg.hpp"
#include "eblp/pipeline.hpp"
#include "eblp/simulate.hpp"

namespace eblp {

struct NnrlsConfig {
    double w = 0.0;
    Index max_iters = 500;
    /// Stop once the relative objective decrease of an accepted step drops below tol.
    double tol = 1e-7;
    /// Convergence tolerance of the partial SVD inside each proximal step, relative to s_1.
    double svd_tol = 1e-6;
    /// Column weights C_jj (sqrt of sampling probabilities); uniform when absent.
    std::optional<Vector> column_weights;
};

struct NnrlsResult {
    Matrix x;
    Index iterations = 0;
    bool converged = false;
    double objective = 0.0;
    /// Objective value of every accepted iterate, starting from X = 0.
    std::vector<double> objective_trace;
};

/// Nuclear-norm regularized least squares
///   min_X 1/2 ||P_Omega(X - Y)||^2 + w ||X C||_*
/// by accelerated proximal gradient with singular value soft-thresholding and
/// a monotone restart.
NnrlsResult nnrls(const Matrix& y_masked, const Matrix& mask, const NnrlsConfig& config);

/// Singular value soft-thresholding; returns the nuclear norm of the result in `nuclear`.
Matrix singular_value_soft_threshold(const Matrix& a, double threshold, double* nuclear = nullptr);

/// sigma (sqrt(p) + sqrt(n)) sqrt(n_obs / (p n)).
double nnrls_weight_white(double sigma, Index p, Index n, double n_obs);

using MatrixSampler = std::function<Matrix(Rng&)>;

/// Mean operator norm of P_Omega(E) C^-1 over simulated pure-noise draws.
double nnrls_weight_colored(const MatrixSampler& noise_sampler, const MatrixSampler& mask_sampler,
                            Index replicates, Rng& rng,
                            const std::optional<Vector>& column_weights = std::nullopt);

/// Plug-in shrinkage of B M^-1 without whitening (OptShrink-style baseline).
Matrix unwhitened_shrinkage(const Dataset& data, Index r, bool center = true);

}  // namespace eblp
