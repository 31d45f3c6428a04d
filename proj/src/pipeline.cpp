#include "eblp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eblp/errors.hpp"

namespace eblp {

void Dataset::validate() const {
    if (y.rows() != d.rows() || y.cols() != d.cols()) {
        throw ShapeError("observations and transform diagonals differ in shape");
    }
    if (y.rows() == 0 || y.cols() == 0) {
        throw ShapeError("empty dataset");
    }
    if (!y.allFinite() || !d.allFinite()) {
        throw NumericError("dataset contains non-finite values");
    }
    if ((d.array() < 0.0).any()) {
        throw DomainError("A^T A diagonals must be nonnegative");
    }
}

Vector backproject(const TransformedObservation& obs) {
    if (obs.y.size() != obs.d.size()) {
        throw ShapeError("observation length " + std::to_string(obs.y.size()) +
                         " does not match transform length " + std::to_string(obs.d.size()));
    }
    return obs.d.cwiseSqrt().cwiseProduct(obs.y);
}

Matrix backproject(const Dataset& data) {
    data.validate();
    return data.d.cwiseSqrt().cwiseProduct(data.y);
}

Vector estimate_m(const Dataset& data, double floor) {
    data.validate();
    const Vector m_hat = data.d.colwise().mean().transpose();
    std::vector<std::size_t> bad;
    for (Index j = 0; j < m_hat.size(); ++j) {
        if (m_hat[j] < floor) bad.push_back(static_cast<std::size_t>(j));
    }
    if (!bad.empty()) {
        throw DegenerateCoordinateError(std::move(bad), floor);
    }
    return m_hat;
}

Vector available_case_mean(const Dataset& data) {
    const Vector num = data.d.cwiseSqrt().cwiseProduct(data.y).colwise().sum().transpose();
    const Vector den = data.d.colwise().sum().transpose();
    Vector mean(num.size());
    for (Index j = 0; j < num.size(); ++j) {
        mean[j] = den[j] > 0.0 ? num[j] / den[j] : 0.0;
    }
    return mean;
}

double out_of_sample_coefficient(double ell_c2, double noise_along_pc) {
    const double denom = ell_c2 + noise_along_pc;
    return denom > 0.0 ? ell_c2 / denom : 0.0;
}

namespace {

struct Prepared {
    EblpModel model;
    Matrix working;
};

Prepared prepare(const Dataset& data, const FitOptions& opts) {
    data.validate();
    const Index n = data.n();
    const Index p = data.p();

    EblpModel model;
    if (opts.m_override) {
        if (opts.m_override->size() != p) throw ShapeError("normalization override has wrong length");
        model.m_hat = *opts.m_override;
        if ((model.m_hat.array() < opts.m_floor).any()) {
            throw DomainError("normalization override falls below the floor");
        }
    } else {
        model.m_hat = estimate_m(data, opts.m_floor);
    }
    model.mean = opts.center ? available_case_mean(data) : Vector::Zero(p);

    const Vector profile = opts.noise_profile ? *opts.noise_profile : Vector::Ones(p);
    if (profile.size() != p || (profile.array() <= 0.0).any()) {
        throw DomainError("noise profile must have p positive entries");
    }
    model.whitened = opts.whiten;
    model.w = opts.whiten ? Vector(model.m_hat.cwiseQuotient(profile).cwiseSqrt()) : Vector::Ones(p);
    model.noise_shape = opts.whiten ? Vector::Ones(p) : Vector(profile.cwiseQuotient(model.m_hat));

    // Working matrix: B M^-1 W with B the centered, backprojected data.
    const Matrix sqrt_d = data.d.cwiseSqrt();
    Matrix working = data.y - sqrt_d.cwiseProduct(Vector::Ones(n) * model.mean.transpose());
    working = sqrt_d.cwiseProduct(working);
    working = working * model.w.cwiseQuotient(model.m_hat).asDiagonal();
    return {std::move(model), std::move(working)};
}

}  // namespace

Index suggest_rank(const Dataset& data, const FitOptions& opts) {
    const Prepared prep = prepare(data, opts);
    return std::max<Index>(1, suggest_rank(prep.working));
}

FitResult fit_in_sample(const Dataset& data, const FitOptions& opts) {
    Prepared prep = prepare(data, opts);
    EblpModel& model = prep.model;
    const Matrix& working = prep.working;
    const Index n = data.n();

    ShrinkOptions shrink_opts;
    shrink_opts.mode = opts.mode;
    shrink_opts.backend = opts.backend;
    shrink_opts.detection_margin = opts.detection_margin;
    if (opts.whiten && opts.noise_variance) {
        shrink_opts.noise_variance = *opts.noise_variance;
    }
    ShrinkResult shrunk = shrink_matrix(working, opts.rank, shrink_opts);

    model.rank = opts.rank;
    model.u_hat = std::move(shrunk.u_hat);
    model.estimates = std::move(shrunk.estimates);
    if (opts.noise_variance) {
        model.noise_variance = *opts.noise_variance;
    } else {
        double signal = 0.0;
        for (const auto& est : model.estimates) signal += est.ell_hat;
        const double trace = working.squaredNorm() / static_cast<double>(n);
        model.noise_variance = std::max(0.0, (trace - signal) / model.noise_shape.sum());
    }
    model.oos_coefficients = Vector::Zero(model.rank);
    for (Index k = 0; k < model.rank; ++k) {
        const auto& est = model.estimates[static_cast<std::size_t>(k)];
        if (!est.supercritical) continue;
        const double d_k =
            model.noise_variance * model.u_hat.col(k).cwiseAbs2().dot(model.noise_shape);
        model.oos_coefficients[k] = out_of_sample_coefficient(est.ell_hat * est.c2_hat, d_k);
    }
    model.fitted = true;

    FitResult out;
    out.x_hat = shrunk.denoised * model.w.cwiseInverse().asDiagonal();
    out.x_hat.rowwise() += model.mean.transpose();
    out.v_hat = std::move(shrunk.v_hat);
    out.model = std::move(model);
    return out;
}

namespace {

void check_model(const EblpModel& model, Index p) {
    if (!model.fitted) {
        throw StateError("model has not been fitted");
    }
    if (p != model.p()) {
        throw ShapeError("observation dimension " + std::to_string(p) +
                         " does not match model dimension " + std::to_string(model.p()));
    }
}

}  // namespace

Vector predict_out_of_sample(const EblpModel& model, const TransformedObservation& obs) {
    check_model(model, obs.y.size());
    const Vector sqrt_d = obs.d.cwiseSqrt();
    if (obs.d.size() != obs.y.size()) throw ShapeError("observation and transform lengths differ");
    Vector b = sqrt_d.cwiseProduct(obs.y - sqrt_d.cwiseProduct(model.mean));
    b = b.cwiseProduct(model.w.cwiseQuotient(model.m_hat));
    const Vector coefs = model.u_hat.transpose() * b;
    Vector x = model.u_hat * model.oos_coefficients.cwiseProduct(coefs);
    return x.cwiseQuotient(model.w) + model.mean;
}

Matrix predict_out_of_sample(const EblpModel& model, const Dataset& data) {
    check_model(model, data.p());
    if (data.n() == 0) {
        return Matrix(0, model.p());
    }
    data.validate();
    const Matrix sqrt_d = data.d.cwiseSqrt();
    Matrix b = data.y - sqrt_d.cwiseProduct(Vector::Ones(data.n()) * model.mean.transpose());
    b = sqrt_d.cwiseProduct(b) * model.w.cwiseQuotient(model.m_hat).asDiagonal();
    Matrix x = (b * model.u_hat) * model.oos_coefficients.asDiagonal() * model.u_hat.transpose();
    x = x * model.w.cwiseInverse().asDiagonal();
    x.rowwise() += model.mean.transpose();
    return x;
}

Vector blp_oracle(const TransformedObservation& obs, const SignalModel& signal,
                  const Vector& noise_cov_diag) {
    const Index p = obs.y.size();
    if (obs.d.size() != p || noise_cov_diag.size() != p || signal.u.rows() != p) {
        throw ShapeError("blp_oracle: inconsistent dimensions");
    }
    if ((noise_cov_diag.array() <= 0.0).any()) {
        throw NumericError("blp_oracle: noise covariance must be positive definite");
    }
    const Vector sqrt_d = obs.d.cwiseSqrt();
    const Vector inv_noise = noise_cov_diag.cwiseInverse();
    const Matrix v = sqrt_d.asDiagonal() * signal.u;  // A u_k
    const Vector root_ell = signal.ell.cwiseMax(0.0).cwiseSqrt();
    // Sigma_X A^T (A Sigma_X A^T + S)^-1 y = U L^1/2 (I + L^1/2 G L^1/2)^-1 L^1/2 h
    const Matrix g = v.transpose() * inv_noise.asDiagonal() * v;
    const Vector h = v.transpose() * inv_noise.cwiseProduct(obs.y);
    const Index r = signal.u.cols();
    const Matrix k = Matrix::Identity(r, r) + root_ell.asDiagonal() * g * root_ell.asDiagonal();
    Eigen::LDLT<Matrix> ldlt(k);
    if (ldlt.info() != Eigen::Success) {
        throw NumericError("blp_oracle: singular system");
    }
    const Vector t = ldlt.solve(root_ell.cwiseProduct(h));
    return signal.u * root_ell.cwiseProduct(t);
}

Vector simple_blp_uniform(const TransformedObservation& obs, const SignalModel& signal, double m) {
    const Vector b = backproject(obs);
    Vector coef = signal.u.transpose() * b;
    for (Index k = 0; k < coef.size(); ++k) {
        const double ell = signal.ell[k];
        coef[k] *= ell / (1.0 + m * ell);
    }
    return signal.u * coef;
}

Dataset to_dataset(const SimulatedData& sim) { return {sim.y, sim.mask}; }

}  // namespace eblp
