#include "eblp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "eblp/errors.hpp"

namespace eblp {

EigenSpectrum::EigenSpectrum(std::vector<double> values, Index n, Index p)
    : values_(std::move(values)), n_(n), p_(p) {
    if (n <= 0 || p <= 0) {
        throw ShapeError("spectrum needs positive n and p");
    }
    const auto keep = static_cast<std::size_t>(std::min(n, p));
    if (values_.size() > static_cast<std::size_t>(p)) {
        throw ShapeError("spectrum has more than p eigenvalues");
    }
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("eigenvalues must be finite and nonnegative");
        }
    }
    std::sort(values_.begin(), values_.end(), std::greater<>());
    // Anything beyond min(n, p) is structurally zero; keep the representation canonical.
    values_.resize(keep, 0.0);
}

EigenSpectrum EigenSpectrum::from_singular_values(const Vector& singular_values, Index n, Index p) {
    std::vector<double> values(static_cast<std::size_t>(singular_values.size()));
    for (Index i = 0; i < singular_values.size(); ++i) {
        values[static_cast<std::size_t>(i)] = singular_values[i] * singular_values[i];
    }
    return EigenSpectrum(std::move(values), n, p);
}

double EigenSpectrum::residual_top(Index r) const {
    if (r < 0 || r >= size()) {
        throw RankError("rank " + std::to_string(r) + " leaves no residual spectrum (min(n,p) = " +
                        std::to_string(size()) + ")");
    }
    return values_[static_cast<std::size_t>(r)];
}

double EigenSpectrum::residual_bottom() const {
    return implicit_zeros() > 0 ? 0.0 : values_.back();
}

double guard_band(double eigenvalue) { return 1e-8 * std::max(1.0, std::abs(eigenvalue)); }

bool above_residual_bulk(const EigenSpectrum& spectrum, Index r, double x) {
    const double top = spectrum.residual_top(r);
    return x >= top + guard_band(top);
}

namespace {

void check_evaluation_point(const EigenSpectrum& spectrum, Index r, double x) {
    const double top = spectrum.residual_top(r);
    const double bottom = spectrum.residual_bottom();
    if (!std::isfinite(x)) {
        throw DomainError("evaluation point must be finite");
    }
    if (x < top + guard_band(top) && x > bottom - guard_band(bottom)) {
        throw DomainError("evaluation point " + std::to_string(x) +
                          " lies within the residual spectrum [" + std::to_string(bottom) + ", " +
                          std::to_string(top) + "]");
    }
}

template <class Term>
double residual_mean(const EigenSpectrum& spectrum, Index r, double x, Term term) {
    check_evaluation_point(spectrum, r, x);
    double sum = 0.0;
    const auto& values = spectrum.values();
    for (auto k = static_cast<std::size_t>(r); k < values.size(); ++k) {
        sum += term(values[k] - x);
    }
    if (spectrum.implicit_zeros() > 0) {
        sum += static_cast<double>(spectrum.implicit_zeros()) * term(-x);
    }
    return sum / static_cast<double>(spectrum.p() - r);
}

}  // namespace

double empirical_stieltjes(const EigenSpectrum& spectrum, Index r, double x) {
    return residual_mean(spectrum, r, x, [](double diff) { return 1.0 / diff; });
}

double empirical_stieltjes_derivative(const EigenSpectrum& spectrum, Index r, double x) {
    return residual_mean(spectrum, r, x, [](double diff) { return 1.0 / (diff * diff); });
}

double companion_stieltjes(double m_val, double x, double gamma) {
    if (x == 0.0) {
        throw DomainError("companion transform is undefined at x = 0");
    }
    return gamma * m_val - (1.0 - gamma) / x;
}

double companion_stieltjes_derivative(double m_prime, double x, double gamma) {
    if (x == 0.0) {
        throw DomainError("companion transform is undefined at x = 0");
    }
    return gamma * m_prime + (1.0 - gamma) / (x * x);
}

SpectralEstimates spectral_estimates(const EigenSpectrum& spectrum, Index r, double x) {
    const double gamma = spectrum.gamma();
    const double m = empirical_stieltjes(spectrum, r, x);
    const double m_prime = empirical_stieltjes_derivative(spectrum, r, x);
    const double mc = companion_stieltjes(m, x, gamma);
    const double mc_prime = companion_stieltjes_derivative(m_prime, x, gamma);
    SpectralEstimates est;
    est.m_hat = m;
    est.m_comp_hat = mc;
    est.d_hat = d_transform(x, m, mc);
    est.d_prime_hat = d_transform_derivative(x, m, mc, m_prime, mc_prime);
    est.eval_point = x;
    return est;
}

double mp_upper_edge(double gamma) {
    const double s = 1.0 + std::sqrt(gamma);
    return s * s;
}

double mp_white_stieltjes(double x, double gamma) {
    if (!(gamma > 0.0)) {
        throw DomainError("aspect ratio must be positive");
    }
    const double edge = mp_upper_edge(gamma);
    if (!(x >= edge)) {
        throw DomainError("Marchenko-Pastur Stieltjes transform requested inside the bulk");
    }
    // Branch with m(x) ~ -1/x as x -> infinity.
    const double shifted = x - 1.0 - gamma;
    const double disc = std::max(0.0, shifted * shifted - 4.0 * gamma);
    return (1.0 - gamma - x + std::sqrt(disc)) / (2.0 * gamma * x);
}

double tracy_widom_relative_scale(Index n, Index p) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double sp = std::sqrt(static_cast<double>(p));
    return std::cbrt(1.0 / sn + 1.0 / sp) / (sn + sp);
}

}  // namespace eblp
