#include "eblp/linalg.hpp"

#include <algorithm>
#include <random>

namespace eblp {

namespace {

Matrix orthonormal_basis(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

Svd full_svd(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

Vector singular_values(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

Svd truncated_svd(const Matrix& a, Index k, const TruncatedSvdOptions& opts, const Matrix& start,
                  Matrix* basis_out) {
    const Index min_dim = std::min(a.rows(), a.cols());
    k = std::clamp<Index>(k, 0, min_dim);
    const Index width = std::min(min_dim, k + opts.oversample);
    if (k == 0) {
        return {Vector(0), Matrix(a.rows(), 0), Matrix(a.cols(), 0)};
    }
    if (2 * width >= min_dim) {
        Svd full = full_svd(a);
        if (basis_out) *basis_out = full.right.leftCols(width);
        return {full.values.head(k), full.left.leftCols(k), full.right.leftCols(k)};
    }

    Matrix omega(a.cols(), width);
    Index filled = 0;
    if (start.size() > 0 && start.rows() == a.cols()) {
        filled = std::min(width, start.cols());
        omega.leftCols(filled) = start.leftCols(filled);
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (Index j = filled; j < width; ++j) {
        for (Index i = 0; i < a.cols(); ++i) {
            omega(i, j) = normal(rng);
        }
    }

    Matrix q = orthonormal_basis(a * omega);
    Vector previous;
    for (int it = 0;; ++it) {
        if (it >= opts.power_iters) {
            if (opts.tol <= 0.0) break;
            const Matrix small = q.transpose() * a;
            const Matrix gram = small * small.transpose();
            Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
            // Ritz values increase monotonically toward the true singular values.
            const Vector current =
                eig.eigenvalues().reverse().head(k).cwiseMax(0.0).cwiseSqrt();
            if (previous.size() == k) {
                double moved = 0.0;
                for (Index i = 0; i < k && current[i] >= opts.converge_floor; ++i) {
                    moved = std::max(moved, current[i] - previous[i]);
                }
                if (moved <= opts.tol * current[0]) break;
            }
            if (it >= opts.max_power_iters) {
                Svd full = full_svd(a);
                if (basis_out) *basis_out = full.right.leftCols(width);
                return {full.values.head(k), full.left.leftCols(k), full.right.leftCols(k)};
            }
            previous = current;
        }
        Matrix z = orthonormal_basis(a.transpose() * q);
        q = orthonormal_basis(a * z);
    }

    Matrix small = q.transpose() * a;  // width x p
    Eigen::JacobiSVD<Matrix> svd(small, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (basis_out) *basis_out = svd.matrixV();
    return {svd.singularValues().head(k), q * svd.matrixU().leftCols(k),
            svd.matrixV().leftCols(k)};
}

}  // namespace eblp
