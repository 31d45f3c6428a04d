#pragma once

#include <optional>
#include <vector>

#include "eblp/linalg.hpp"
#include "eblp/shrinkage.hpp"
#include "eblp/simulate.hpp"

namespace eblp {

/// One observation Y = A X + noise with diagonal A.
///
/// `y` lives in sample space (length p, zeros where A has a zero entry) and
/// `d` is the diagonal of A^T A, so A = diag(sqrt(d)). For coordinate
/// selection d is a 0/1 mask.
struct TransformedObservation {
    Vector y;
    Vector d;
};

/// n observations stacked as rows.
struct Dataset {
    Matrix y;  // n x p
    Matrix d;  // n x p

    Index n() const noexcept { return y.rows(); }
    Index p() const noexcept { return y.cols(); }
    TransformedObservation row(Index i) const { return {y.row(i).transpose(), d.row(i).transpose()}; }
    void validate() const;
};

/// A^T y = sqrt(d) * y.
Vector backproject(const TransformedObservation& obs);
Matrix backproject(const Dataset& data);

/// Mean of the A_i^T A_i diagonals; throws DegenerateCoordinateError listing
/// coordinates whose mean falls below `floor`.
Vector estimate_m(const Dataset& data, double floor = 1e-6);

/// Available-case column means: sum_i sqrt(d_ij) y_ij / sum_i d_ij.
Vector available_case_mean(const Dataset& data);

struct FitOptions {
    Index rank = 1;
    bool whiten = true;
    ShrinkMode mode = ShrinkMode::Plugin;
    bool center = true;
    double m_floor = 1e-6;
    std::optional<double> detection_margin;  // per-mode default when absent
    SvdBackend backend = SvdBackend::Auto;
    /// Relative per-coordinate noise variances of the original noise (all ones
    /// for white noise). Whitening uses W = (M / profile)^{1/2}.
    std::optional<Vector> noise_profile;
    /// Known scale of the original noise variance; estimated when absent.
    std::optional<double> noise_variance;
    /// Use this normalization instead of the sample mean of A_i^T A_i.
    std::optional<Vector> m_override;
};

/// Everything needed to denoise new observations; training data is not retained.
struct EblpModel {
    Matrix u_hat;  // p x r, orthonormal, working (whitened if `whitened`) coordinates
    std::vector<SpikeEstimate> estimates;
    Vector m_hat;         // p
    Vector w;             // p, whitening diagonal (ones if not whitened)
    Vector mean;          // p, subtracted before fitting (zeros if not centered)
    Vector noise_shape;   // p, effective noise covariance diagonal up to noise_variance
    double noise_variance = 0.0;
    Vector oos_coefficients;  // r, eta_k for out-of-sample prediction
    Index rank = 0;
    bool whitened = false;
    bool fitted = false;

    Index p() const noexcept { return m_hat.size(); }
    /// In-sample AMSE estimate in working coordinates (W-loss when whitened).
    double amse() const { return eblp::amse(estimates); }
};

struct FitResult {
    EblpModel model;
    Matrix x_hat;  // n x p predictions
    Matrix v_hat;  // n x r right singular vectors of the working matrix
};

/// In-sample empirical best linear prediction.
FitResult fit_in_sample(const Dataset& data, const FitOptions& opts);

/// Rank heuristic applied to the working (centered, normalized, whitened) matrix; at least 1.
Index suggest_rank(const Dataset& data, const FitOptions& opts);

/// eta = ell c^2 / (ell c^2 + d).
double out_of_sample_coefficient(double ell_c2, double noise_along_pc);

Vector predict_out_of_sample(const EblpModel& model, const TransformedObservation& obs);
Matrix predict_out_of_sample(const EblpModel& model, const Dataset& data);

/// Exact best linear predictor Sigma_X A^T (A Sigma_X A^T + Sigma_eps)^-1 y for
/// a diagonal noise covariance, solved through an r x r system.
Vector blp_oracle(const TransformedObservation& obs, const SignalModel& signal,
                  const Vector& noise_cov_diag);

/// sum_k ell_k / (1 + m ell_k) u_k u_k^T A^T y.
Vector simple_blp_uniform(const TransformedObservation& obs, const SignalModel& signal, double m);

/// Wraps simulated masked data as a dataset.
Dataset to_dataset(const SimulatedData& sim);

}  // namespace eblp
