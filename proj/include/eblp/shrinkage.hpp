#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eblp/linalg.hpp"
#include "eblp/spectral.hpp"

namespace eblp {

/// Per-component estimates for one observed spike of B / sqrt(n).
///
/// `ell_hat` is the signal eigenvalue, `c2_hat` / `ct2_hat` the squared
/// cosines of the right (PC) and left (score) singular vectors, all in the
/// units of the n^-1 B^T B spectrum. Subcritical components carry zeros.
struct SpikeEstimate {
    double ell_hat = 0.0;
    double c2_hat = 0.0;
    double ct2_hat = 0.0;
    double lambda_star = 0.0;
    double sigma_obs = 0.0;
    bool supercritical = false;
    /// A plug-in cosine fell outside [0, 1] and was clamped.
    bool clamped = false;
};

enum class ShrinkMode { Plugin, White };

enum class SvdBackend {
    Auto,       // full for plug-in, truncated for white mode
    Full,
    Truncated,
};

struct ShrinkOptions {
    ShrinkMode mode = ShrinkMode::Plugin;
    SvdBackend backend = SvdBackend::Auto;
    /// Extra separation above the bulk edge, in Tracy-Widom units, that an
    /// observed spike needs before it is treated as signal. Defaults per mode.
    std::optional<double> detection_margin;
    /// Known noise variance per coordinate (white mode). Estimated from the
    /// trace of the data when absent.
    std::optional<double> noise_variance;
};

/// 8 for plug-in (gap to the next residual eigenvalue has a heavy null tail), 4 for white.
double default_detection_margin(ShrinkMode mode);

/// Plug-in estimate for the k-th (0-based, k < r) spike of `spectrum`, using
/// the bottom p - r eigenvalues as the noise bulk.
SpikeEstimate estimate_spike(const EigenSpectrum& spectrum, Index r, Index k,
                             double detection_margin = 0.0);

/// lambda* = sqrt(ell) c c~.
double optimal_lambda(const SpikeEstimate& est);

/// Sum of ell (1 - c^2 c~^2) over components.
double amse(std::span<const SpikeEstimate> estimates);

struct WhiteSpike {
    double lambda_emp = 0.0;
    double c2 = 0.0;
    double ct2 = 0.0;
};

/// Limiting top eigenvalue and squared cosines of a spike of strength `ell`
/// in unit white noise with aspect ratio gamma.
WhiteSpike white_spike_forward(double ell, double gamma);

/// Spike strength whose limiting eigenvalue is lambda_emp; 0 at or below the edge.
double white_spike_inverse(double lambda_emp, double gamma);

/// Closed-form estimate for an observed singular value of B / sqrt(n) when the
/// noise is white with the given variance.
SpikeEstimate estimate_white_spike(double sigma_obs, double gamma, double noise_variance,
                                   double detection_threshold);

/// Noise variance of white-noise data from the trace of n^-1 B^T B and its top
/// eigenvalues, by fixed-point iteration of
///   v = (trace - sum_k v * ell(top_k / v)) / p.
double estimate_white_noise_variance(double trace, std::span<const double> top_eigenvalues,
                                     double gamma, Index p);

struct ShrinkResult {
    Matrix denoised;     // n x p
    Matrix u_hat;        // p x r, right singular vectors
    Matrix v_hat;        // n x r, left singular vectors
    std::vector<SpikeEstimate> estimates;
    /// Noise variance per coordinate implied by the fit (white mode); the plug-in
    /// path reports (trace - sum ell_hat) / p.
    double noise_variance = 0.0;
};

/// Optimal singular value shrinkage of an n x p matrix whose rows are samples.
ShrinkResult shrink_matrix(const Matrix& matrix, Index r, const ShrinkOptions& opts = {});

/// Heuristic rank: number of eigenvalues exceeding (1 + sqrt(gamma))^2 (1 + eps)
/// in estimated noise units. Not an optimality-backed selector.
Index suggest_rank(const Matrix& matrix, double eps = 0.05);

}  // namespace eblp
