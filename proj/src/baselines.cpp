#include "eblp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "eblp/errors.hpp"

namespace eblp {

namespace {

/// Soft-thresholding with an adaptively sized randomized SVD, warm started
/// from the previous right singular subspace.
class SoftThresholder {
public:
    explicit SoftThresholder(double svd_tol) : svd_tol_(svd_tol) {}

    Matrix apply(const Matrix& a, double threshold, double& nuclear) {
        const Index min_dim = std::min(a.rows(), a.cols());
        Index k = std::min(min_dim, rank_ + 5);
        Svd svd;
        Matrix next_basis;
        for (;;) {
            TruncatedSvdOptions opts;
            opts.power_iters = 1;
            opts.tol = svd_tol_;
            opts.converge_floor = threshold;
            opts.seed = 0x5eedULL + static_cast<std::uint64_t>(calls_);
            svd = truncated_svd(a, k, opts, basis_, &next_basis);
            if (k >= min_dim || svd.values[k - 1] <= threshold) break;
            k = std::min(min_dim, 2 * k);
        }
        ++calls_;
        Index keep = 0;
        while (keep < svd.values.size() && svd.values[keep] > threshold) ++keep;
        rank_ = keep;
        basis_ = std::move(next_basis);
        const Vector shrunk = (svd.values.head(keep).array() - threshold).matrix();
        nuclear = shrunk.sum();
        return svd.left.leftCols(keep) * shrunk.asDiagonal() * svd.right.leftCols(keep).transpose();
    }

private:
    double svd_tol_;
    Index rank_ = 5;
    Matrix basis_;
    int calls_ = 0;
};

}  // namespace

Matrix singular_value_soft_threshold(const Matrix& a, double threshold, double* nuclear) {
    const Svd svd = full_svd(a);
    const Vector shrunk = (svd.values.array() - threshold).cwiseMax(0.0).matrix();
    if (nuclear) *nuclear = shrunk.sum();
    return svd.left * shrunk.asDiagonal() * svd.right.transpose();
}

NnrlsResult nnrls(const Matrix& y_masked, const Matrix& mask, const NnrlsConfig& config) {
    if (y_masked.rows() != mask.rows() || y_masked.cols() != mask.cols()) {
        throw ShapeError("nnrls: data and mask differ in shape");
    }
    if (!(config.w >= 0.0)) throw DomainError("nnrls: weight must be nonnegative");
    if (!(config.tol > 0.0)) throw DomainError("nnrls: tolerance must be positive");
    const Index n = y_masked.rows();
    const Index p = y_masked.cols();

    Vector c_inv = Vector::Ones(p);
    if (config.column_weights) {
        if (config.column_weights->size() != p || (config.column_weights->array() <= 0.0).any()) {
            throw DomainError("nnrls: column weights must be p positive values");
        }
        c_inv = config.column_weights->cwiseInverse();
    }
    // Gradient of the data term in Z = X C is 1/min(C)^2 Lipschitz.
    const double step = 1.0 / c_inv.cwiseAbs2().maxCoeff();
    const Matrix y = mask.cwiseProduct(y_masked);

    auto data_residual = [&](const Matrix& z) {
        return Matrix(mask.cwiseProduct(z * c_inv.asDiagonal() - y));
    };
    auto data_term = [&](const Matrix& residual) { return 0.5 * residual.squaredNorm(); };

    SoftThresholder prox(config.svd_tol);
    auto prox_step = [&](const Matrix& z, double& nuclear, Matrix& residual) {
        residual = data_residual(z);
        const Matrix g = z - step * (residual * c_inv.asDiagonal());
        if (config.w == 0.0) {
            nuclear = 0.0;
            return g;
        }
        return prox.apply(g, step * config.w, nuclear);
    };

    NnrlsResult out;
    Matrix z_prev = Matrix::Zero(n, p);
    Matrix extrapolated = z_prev;
    double f_prev = data_term(data_residual(z_prev));
    out.objective_trace.push_back(f_prev);
    double t = 1.0;

    Index it = 0;
    for (; it < config.max_iters; ++it) {
        double nuclear = 0.0;
        Matrix residual;
        Matrix z_new = prox_step(extrapolated, nuclear, residual);
        double f_new = data_term(data_residual(z_new)) + config.w * nuclear;
        if (f_new > f_prev) {
            // Momentum overshoot: fall back to a plain proximal step from the last iterate.
            t = 1.0;
            z_new = prox_step(z_prev, nuclear, residual);
            f_new = data_term(data_residual(z_new)) + config.w * nuclear;
            if (f_new > f_prev) {
                out.converged = true;
                break;
            }
        }
        const double decrease = (f_prev - f_new) / std::max(f_prev, 1e-300);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        extrapolated = z_new + ((t - 1.0) / t_next) * (z_new - z_prev);
        z_prev = std::move(z_new);
        f_prev = f_new;
        t = t_next;
        out.objective_trace.push_back(f_new);
        if (decrease < config.tol) {
            out.converged = true;
            ++it;
            break;
        }
    }
    out.iterations = it;
    out.objective = f_prev;
    out.x = z_prev * c_inv.asDiagonal();
    return out;
}

double nnrls_weight_white(double sigma, Index p, Index n, double n_obs) {
    const double pd = static_cast<double>(p);
    const double nd = static_cast<double>(n);
    return sigma * (std::sqrt(pd) + std::sqrt(nd)) * std::sqrt(n_obs / (pd * nd));
}

double nnrls_weight_colored(const MatrixSampler& noise_sampler, const MatrixSampler& mask_sampler,
                            Index replicates, Rng& rng, const std::optional<Vector>& column_weights) {
    if (replicates < 1) throw DomainError("nnrls_weight_colored: need at least one replicate");
    double total = 0.0;
    for (Index rep = 0; rep < replicates; ++rep) {
        const Matrix noise = noise_sampler(rng);
        const Matrix mask = mask_sampler(rng);
        Matrix masked = mask.cwiseProduct(noise);
        if (column_weights) masked = masked * column_weights->cwiseInverse().asDiagonal();
        TruncatedSvdOptions opts;
        opts.seed = derive_seed(0xabcdef, {static_cast<std::uint64_t>(rep)});
        total += truncated_svd(masked, 1, opts).values[0];
    }
    return total / static_cast<double>(replicates);
}

Matrix unwhitened_shrinkage(const Dataset& data, Index r, bool center) {
    FitOptions opts;
    opts.rank = r;
    opts.whiten = false;
    opts.mode = ShrinkMode::Plugin;
    opts.center = center;
    return fit_in_sample(data, opts).x_hat;
}

}  // namespace eblp
