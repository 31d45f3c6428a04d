#pragma once

// Independent reference computations. Nothing here calls into the library's
// spectral or shrinkage code; agreement with it is what the tests check.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Stieltjes transform of the unit-variance Marchenko-Pastur law at x above its
/// support, by quadrature of the density in the variable t = a + (b - a)(1 - cos th)/2.
/// The point mass 1 - 1/gamma at zero (gamma > 1) is added explicitly.
inline double mp_stieltjes_quadrature(double x, double gamma, int nodes = 200000) {
    const double a = (1.0 - std::sqrt(gamma)) * (1.0 - std::sqrt(gamma));
    const double b = (1.0 + std::sqrt(gamma)) * (1.0 + std::sqrt(gamma));
    // density(t) = sqrt((b - t)(t - a)) / (2 pi gamma t); the cosine substitution
    // removes the square-root endpoint behaviour, so the midpoint rule converges fast.
    const double h = std::numbers::pi / nodes;
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double th = (i + 0.5) * h;
        const double t = a + (b - a) * (1.0 - std::cos(th)) / 2.0;
        const double dt = (b - a) * std::sin(th) / 2.0;
        const double root = std::sqrt(std::max(0.0, (b - t) * (t - a)));
        const double density = root / (2.0 * std::numbers::pi * gamma * t);
        sum += density / (t - x) * dt * h;
    }
    if (gamma > 1.0) sum += (1.0 - 1.0 / gamma) / (0.0 - x);
    return sum;
}

/// Optimal Frobenius shrinker for singular values y of X + Z / sqrt(n) with
/// unit noise, aspect ratio gamma: sqrt((y^2 - gamma - 1)^2 - 4 gamma) / y above
/// the edge 1 + sqrt(gamma), 0 below.
inline double frobenius_shrinker(double y, double gamma) {
    const double edge = 1.0 + std::sqrt(gamma);
    if (y <= edge) return 0.0;
    const double t = y * y - gamma - 1.0;
    return std::sqrt(std::max(0.0, t * t - 4.0 * gamma)) / y;
}

/// Exact BLP by a dense inverse of the full p x p system
/// Sigma_X A^T (A Sigma_X A^T + Sigma_eps)^-1 y, A = diag(sqrt(d)), restricted
/// to the coordinates with d > 0.
inline Vector blp_dense(const Vector& y, const Vector& d, const Matrix& u, const Vector& ell,
                        const Vector& noise) {
    const Eigen::Index p = d.size();
    std::vector<Eigen::Index> obs;
    for (Eigen::Index j = 0; j < p; ++j)
        if (d[j] > 0.0) obs.push_back(j);
    const Eigen::Index q = static_cast<Eigen::Index>(obs.size());
    Matrix a = Matrix::Zero(q, p);
    Vector yq(q);
    Matrix noise_q = Matrix::Zero(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        a(i, obs[i]) = std::sqrt(d[obs[i]]);
        yq[i] = y[obs[i]];
        noise_q(i, i) = noise[obs[i]];
    }
    const Matrix sigma_x = u * ell.asDiagonal() * u.transpose();
    const Matrix s = a * sigma_x * a.transpose() + noise_q;
    return sigma_x * a.transpose() * s.inverse() * yq;
}

/// Best error over per-component singular values for the rank-r family
/// sqrt(n) sum_k lambda_k v_k u_k^T, searched on the grid lambda in [0, top]
/// with step `step`. The error separates across components because the
/// rank-one terms are mutually orthogonal.
struct GridResult {
    double best_error = 0.0;
    Vector best_lambda;
};

inline GridResult grid_shrinkage(const Matrix& u, const Matrix& v, const Matrix& target, double top,
                                 double step) {
    const double n = static_cast<double>(v.rows());
    const Eigen::Index r = u.cols();
    GridResult out;
    out.best_lambda = Vector::Zero(r);
    double total = target.squaredNorm();
    for (Eigen::Index k = 0; k < r; ++k) {
        const double proj = v.col(k).dot(target * u.col(k));
        double best = 0.0;
        double best_lambda = 0.0;
        for (double lambda = 0.0; lambda <= top + 0.5 * step; lambda += step) {
            const double delta = n * lambda * lambda - 2.0 * std::sqrt(n) * lambda * proj;
            if (delta < best) {
                best = delta;
                best_lambda = lambda;
            }
        }
        total += best;
        out.best_lambda[k] = best_lambda;
    }
    out.best_error = std::sqrt(std::max(0.0, total));
    return out;
}

}  // namespace oracle
