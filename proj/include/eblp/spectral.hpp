#pragma once

#include <vector>

#include "eblp/linalg.hpp"

namespace eblp {

/// Eigenvalues of the p x p sample covariance n^-1 B^T B, stored in decreasing
/// order. Only the min(n, p) possibly nonzero values are kept; when p > n the
/// remaining p - n eigenvalues are exact zeros and are accounted for implicitly.
class EigenSpectrum {
public:
    EigenSpectrum(std::vector<double> values, Index n, Index p);

    /// Spectrum of n^-1 B^T B from the singular values of B / sqrt(n).
    static EigenSpectrum from_singular_values(const Vector& singular_values, Index n, Index p);

    const std::vector<double>& values() const noexcept { return values_; }
    Index n() const noexcept { return n_; }
    Index p() const noexcept { return p_; }
    double gamma() const noexcept { return static_cast<double>(p_) / static_cast<double>(n_); }

    /// Number of stored eigenvalues, min(n, p).
    Index size() const noexcept { return static_cast<Index>(values_.size()); }

    /// Number of implicit zero eigenvalues, p - min(n, p).
    Index implicit_zeros() const noexcept { return p_ - size(); }

    /// Largest eigenvalue with index >= r (0-based), i.e. the top of the residual bulk.
    double residual_top(Index r) const;

    /// Smallest residual eigenvalue, counting implicit zeros.
    double residual_bottom() const;

private:
    std::vector<double> values_;
    Index n_;
    Index p_;
};

/// Plug-in spectral functionals evaluated at a single point above the residual bulk.
struct SpectralEstimates {
    double m_hat = 0.0;
    double m_comp_hat = 0.0;
    double d_hat = 0.0;
    double d_prime_hat = 0.0;
    double eval_point = 0.0;
};

/// Separation required between an evaluation point and a residual eigenvalue.
double guard_band(double eigenvalue);

/// True when x clears the top residual eigenvalue by at least the guard band.
bool above_residual_bulk(const EigenSpectrum& spectrum, Index r, double x);

/// (p - r)^-1 * sum_{k > r} 1 / (lambda_k - x), zeros included when p > n.
/// Throws RankError when r >= min(n, p), DomainError when x is not separated
/// from the residual eigenvalues.
double empirical_stieltjes(const EigenSpectrum& spectrum, Index r, double x);

/// Derivative of empirical_stieltjes in x: (p - r)^-1 * sum 1 / (lambda_k - x)^2.
double empirical_stieltjes_derivative(const EigenSpectrum& spectrum, Index r, double x);

/// Stieltjes transform of the companion law gamma F + (1 - gamma) delta_0.
double companion_stieltjes(double m_val, double x, double gamma);

double companion_stieltjes_derivative(double m_prime, double x, double gamma);

/// D(x) = x m(x) m_comp(x).
inline double d_transform(double x, double m_val, double m_comp_val) {
    return x * m_val * m_comp_val;
}

/// Product rule for D(x) = x m(x) m_comp(x).
inline double d_transform_derivative(double x, double m_val, double m_comp_val, double m_prime,
                                     double m_comp_prime) {
    return m_val * m_comp_val + x * m_prime * m_comp_val + x * m_val * m_comp_prime;
}

/// All plug-in functionals at x from the bottom p - r eigenvalues.
SpectralEstimates spectral_estimates(const EigenSpectrum& spectrum, Index r, double x);

/// Upper edge (1 + sqrt(gamma))^2 of the standard Marchenko-Pastur law.
double mp_upper_edge(double gamma);

/// Closed-form Stieltjes transform of the standard (unit variance)
/// Marchenko-Pastur law with ratio gamma, for real x at or above the upper edge.
double mp_white_stieltjes(double x, double gamma);

/// Relative Tracy-Widom fluctuation scale of the top eigenvalue of a white
/// n x p sample covariance, sd(lambda_max) / E(lambda_max) to leading order.
double tracy_widom_relative_scale(Index n, Index p);

}  // namespace eblp
