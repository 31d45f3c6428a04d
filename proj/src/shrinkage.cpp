#include "eblp/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eblp/errors.hpp"

namespace eblp {

namespace {

SpikeEstimate subcritical(double sigma_obs) {
    SpikeEstimate est;
    est.sigma_obs = sigma_obs;
    return est;
}

double clamp_unit(double value, bool& clamped) {
    const double out = std::clamp(value, 0.0, 1.0);
    if (std::abs(out - value) > 0.0) {
        clamped = true;
    }
    return out;
}

}  // namespace

double default_detection_margin(ShrinkMode mode) {
    return mode == ShrinkMode::Plugin ? 8.0 : 4.0;
}

SpikeEstimate estimate_spike(const EigenSpectrum& spectrum, Index r, Index k,
                             double detection_margin) {
    if (k < 0 || k >= r) {
        throw RankError("component index " + std::to_string(k) + " out of range for rank " +
                        std::to_string(r));
    }
    if (k >= spectrum.size()) {
        throw RankError("component index exceeds the spectrum");
    }
    const double x = spectrum.values()[static_cast<std::size_t>(k)];
    const double sigma_obs = std::sqrt(x);
    if (!above_residual_bulk(spectrum, r, x)) {
        return subcritical(sigma_obs);
    }
    const double top = spectrum.residual_top(r);
    const double margin = detection_margin * tracy_widom_relative_scale(spectrum.n(), spectrum.p());
    if (x <= top * (1.0 + margin)) {
        return subcritical(sigma_obs);
    }

    const SpectralEstimates sp = spectral_estimates(spectrum, r, x);
    if (!(sp.d_hat > 0.0) || !(sp.d_prime_hat < 0.0) || !std::isfinite(sp.d_hat)) {
        return subcritical(sigma_obs);
    }
    SpikeEstimate est;
    est.sigma_obs = sigma_obs;
    est.supercritical = true;
    est.ell_hat = 1.0 / sp.d_hat;
    // c^2 = m / (D' ell) = m D / D'
    est.c2_hat = clamp_unit(sp.m_hat * sp.d_hat / sp.d_prime_hat, est.clamped);
    est.ct2_hat = clamp_unit(sp.m_comp_hat * sp.d_hat / sp.d_prime_hat, est.clamped);
    est.lambda_star = optimal_lambda(est);
    return est;
}

double optimal_lambda(const SpikeEstimate& est) {
    if (!est.supercritical) {
        return 0.0;
    }
    return std::sqrt(est.ell_hat) * std::sqrt(est.c2_hat) * std::sqrt(est.ct2_hat);
}

double amse(std::span<const SpikeEstimate> estimates) {
    double total = 0.0;
    for (const auto& est : estimates) {
        total += est.ell_hat * (1.0 - est.c2_hat * est.ct2_hat);
    }
    return total;
}

WhiteSpike white_spike_forward(double ell, double gamma) {
    if (!(ell > 0.0) || !(gamma > 0.0)) {
        throw DomainError("spike strength and aspect ratio must be positive");
    }
    if (ell <= std::sqrt(gamma)) {
        return {mp_upper_edge(gamma), 0.0, 0.0};
    }
    const double numer = 1.0 - gamma / (ell * ell);
    return {(ell + 1.0) * (1.0 + gamma / ell), numer / (1.0 + gamma / ell), numer / (1.0 + 1.0 / ell)};
}

double white_spike_inverse(double lambda_emp, double gamma) {
    if (!(gamma > 0.0)) {
        throw DomainError("aspect ratio must be positive");
    }
    if (!(lambda_emp > mp_upper_edge(gamma))) {
        return 0.0;
    }
    const double b = lambda_emp - 1.0 - gamma;
    return 0.5 * (b + std::sqrt(std::max(0.0, b * b - 4.0 * gamma)));
}

SpikeEstimate estimate_white_spike(double sigma_obs, double gamma, double noise_variance,
                                   double detection_threshold) {
    const double x = sigma_obs * sigma_obs;
    if (!(x > 0.0)) {
        return subcritical(sigma_obs);
    }
    SpikeEstimate est;
    est.sigma_obs = sigma_obs;
    if (!(noise_variance > 0.0)) {
        // Noiseless: the observed component is the signal.
        est.supercritical = true;
        est.ell_hat = x;
        est.c2_hat = 1.0;
        est.ct2_hat = 1.0;
        est.lambda_star = sigma_obs;
        return est;
    }
    const double lambda_emp = x / noise_variance;
    if (lambda_emp <= std::max(detection_threshold, mp_upper_edge(gamma))) {
        return subcritical(sigma_obs);
    }
    const double ell = white_spike_inverse(lambda_emp, gamma);
    const WhiteSpike fwd = white_spike_forward(ell, gamma);
    est.supercritical = true;
    est.ell_hat = noise_variance * ell;
    est.c2_hat = fwd.c2;
    est.ct2_hat = fwd.ct2;
    est.lambda_star = optimal_lambda(est);
    return est;
}

double estimate_white_noise_variance(double trace, std::span<const double> top_eigenvalues,
                                     double gamma, Index p) {
    if (!(trace > 0.0)) {
        return 0.0;
    }
    double v = trace / static_cast<double>(p);
    for (int it = 0; it < 500; ++it) {
        double signal = 0.0;
        for (double x : top_eigenvalues) {
            signal += v * white_spike_inverse(x / v, gamma);
        }
        const double next = std::max(0.0, (trace - signal) / static_cast<double>(p));
        if (std::abs(next - v) <= 1e-14 * v || next == 0.0) {
            return next;
        }
        v = next;
    }
    return v;
}

ShrinkResult shrink_matrix(const Matrix& matrix, Index r, const ShrinkOptions& opts) {
    const Index n = matrix.rows();
    const Index p = matrix.cols();
    const Index min_dim = std::min(n, p);
    if (n == 0 || p == 0) {
        throw ShapeError("cannot shrink an empty matrix");
    }
    if (r < 0 || r > min_dim) {
        throw RankError("rank " + std::to_string(r) + " exceeds min(n, p) = " +
                        std::to_string(min_dim));
    }
    if (!matrix.allFinite()) {
        throw NumericError("input matrix contains non-finite values");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const Matrix scaled = matrix / root_n;
    const double gamma = static_cast<double>(p) / static_cast<double>(n);
    const double trace = scaled.squaredNorm();

    const double margin = opts.detection_margin.value_or(default_detection_margin(opts.mode));
    ShrinkResult out;
    out.estimates.reserve(static_cast<std::size_t>(r));
    Svd svd;

    if (opts.mode == ShrinkMode::Plugin) {
        if (r == min_dim) {
            throw RankError("plug-in shrinkage needs r < min(n, p) to leave a noise bulk");
        }
        svd = full_svd(scaled);
        const EigenSpectrum spectrum = EigenSpectrum::from_singular_values(svd.values, n, p);
        double signal = 0.0;
        for (Index k = 0; k < r; ++k) {
            out.estimates.push_back(estimate_spike(spectrum, r, k, margin));
            signal += out.estimates.back().ell_hat;
        }
        out.noise_variance = std::max(0.0, (trace - signal) / static_cast<double>(p));
    } else {
        const bool truncated = opts.backend == SvdBackend::Truncated ||
                               (opts.backend == SvdBackend::Auto && 4 * (r + 10) < min_dim);
        if (truncated) {
            svd = truncated_svd(scaled, r);
        } else {
            svd = full_svd(scaled);
        }
        std::vector<double> top(static_cast<std::size_t>(r));
        for (Index k = 0; k < r; ++k) {
            top[static_cast<std::size_t>(k)] = svd.values[k] * svd.values[k];
        }
        const double noise = opts.noise_variance.has_value()
                                 ? *opts.noise_variance
                                 : estimate_white_noise_variance(trace, top, gamma, p);
        const double threshold = mp_upper_edge(gamma) *
                                 (1.0 + margin * tracy_widom_relative_scale(n, p));
        for (Index k = 0; k < r; ++k) {
            out.estimates.push_back(estimate_white_spike(svd.values[k], gamma, noise, threshold));
        }
        out.noise_variance = noise;
    }

    out.u_hat = svd.right.leftCols(r);
    out.v_hat = svd.left.leftCols(r);
    Vector lambdas(r);
    for (Index k = 0; k < r; ++k) {
        lambdas[k] = out.estimates[static_cast<std::size_t>(k)].lambda_star;
    }
    out.denoised = root_n * (out.v_hat * lambdas.asDiagonal() * out.u_hat.transpose());
    return out;
}

Index suggest_rank(const Matrix& matrix, double eps) {
    const Index n = matrix.rows();
    const Index p = matrix.cols();
    const double gamma = static_cast<double>(p) / static_cast<double>(n);
    const Vector sv = singular_values(matrix / std::sqrt(static_cast<double>(n)));
    const double trace = sv.squaredNorm();
    const double edge = mp_upper_edge(gamma) * (1.0 + eps);
    const Index max_rank = std::min(n, p) - 1;
    Index r = 0;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> top(static_cast<std::size_t>(r));
        for (Index k = 0; k < r; ++k) {
            top[static_cast<std::size_t>(k)] = sv[k] * sv[k];
        }
        const double v = estimate_white_noise_variance(trace, top, gamma, p);
        Index count = 0;
        while (count < max_rank && v > 0.0 && sv[count] * sv[count] > v * edge) {
            ++count;
        }
        if (count == r) {
            break;
        }
        r = count;
    }
    return r;
}

}  // namespace eblp
