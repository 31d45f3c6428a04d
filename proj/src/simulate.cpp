#include "eblp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eblp/errors.hpp"

namespace eblp {

Index ExperimentConfig::n() const {
    return static_cast<Index>(std::llround(static_cast<double>(p) / gamma));
}

void ExperimentConfig::validate() const {
    if (p <= 0) throw DomainError("p must be positive");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (ell.empty()) throw DomainError("at least one spike is required");
    for (std::size_t k = 0; k < ell.size(); ++k) {
        if (!(ell[k] > 0.0)) throw DomainError("spike strengths must be positive");
        if (k > 0 && !(ell[k] < ell[k - 1])) {
            throw DomainError("spike strengths must be strictly decreasing");
        }
    }
    if (static_cast<Index>(ell.size()) > p) throw DomainError("rank exceeds dimension");
    if (sparsity) {
        if (*sparsity < static_cast<Index>(ell.size())) {
            throw DomainError("sparsity " + std::to_string(*sparsity) + " is below the rank " +
                              std::to_string(ell.size()));
        }
        if (*sparsity > p) throw DomainError("sparsity exceeds dimension");
    }
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("sampling rate must be in (0, 1]");
    if (!(kappa >= 1.0)) throw DomainError("condition number must be >= 1");
    if (!(sigma >= 0.0)) throw DomainError("noise level must be nonnegative");
    if (replicates < 0) throw DomainError("replicates must be nonnegative");
}

namespace {

Matrix orthonormal_columns(const Matrix& a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

SignalDraw generate_signals(const ExperimentConfig& config, Index n, Rng& rng,
                            const ScoreSampler& scores) {
    config.validate();
    const Index p = config.p;
    const auto r = static_cast<Index>(config.ell.size());
    std::normal_distribution<double> normal;

    SignalModel model;
    model.ell = Eigen::Map<const Vector>(config.ell.data(), r);
    model.u = Matrix::Zero(p, r);
    if (config.sparsity) {
        const Index m = *config.sparsity;
        std::vector<Index> coords(static_cast<std::size_t>(p));
        std::iota(coords.begin(), coords.end(), Index{0});
        std::shuffle(coords.begin(), coords.end(), rng);
        Matrix g(m, r);
        for (Index j = 0; j < r; ++j)
            for (Index i = 0; i < m; ++i) g(i, j) = normal(rng);
        const Matrix q = orthonormal_columns(g);
        for (Index i = 0; i < m; ++i) {
            model.u.row(coords[static_cast<std::size_t>(i)]) = q.row(i);
        }
    } else {
        Matrix g(p, r);
        for (Index j = 0; j < r; ++j)
            for (Index i = 0; i < p; ++i) g(i, j) = normal(rng);
        model.u = orthonormal_columns(g);
    }
    model.mean = Vector::Zero(p);
    if (config.random_mean) {
        for (Index j = 0; j < p; ++j) model.mean[j] = normal(rng);
    }

    SignalDraw draw;
    draw.x = sample_signals(model, n, rng, scores);
    draw.model = std::move(model);
    return draw;
}

Matrix sample_signals(const SignalModel& model, Index n, Rng& rng, const ScoreSampler& scores) {
    const Index r = model.ell.size();
    if (model.u.cols() != r || model.mean.size() != model.u.rows()) {
        throw ShapeError("signal model components disagree in shape");
    }
    std::normal_distribution<double> normal;
    Matrix z(n, r);
    for (Index k = 0; k < r; ++k)
        for (Index i = 0; i < n; ++i) z(i, k) = scores ? scores(rng) : normal(rng);
    Matrix x = z * model.ell.cwiseSqrt().asDiagonal() * model.u.transpose();
    x.rowwise() += model.mean.transpose();
    return x;
}

Vector column_probabilities(const ExperimentConfig& config) {
    Vector prob = Vector::Constant(config.p, config.delta);
    if (config.sampling == Sampling::Linear && config.p > 1) {
        for (Index j = 0; j < config.p; ++j) {
            prob[j] = config.delta + static_cast<double>(j) * (1.0 - 2.0 * config.delta) /
                                         static_cast<double>(config.p - 1);
        }
    }
    return prob;
}

Matrix generate_masks(const ExperimentConfig& config, Index n, Rng& rng) {
    const Vector prob = column_probabilities(config);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix mask(n, config.p);
    for (Index j = 0; j < config.p; ++j)
        for (Index i = 0; i < n; ++i) mask(i, j) = unif(rng) < prob[j] ? 1.0 : 0.0;
    return mask;
}

Vector noise_variances(const ExperimentConfig& config) {
    const double s2 = config.sigma * config.sigma;
    if (config.noise == NoiseKind::White || config.p == 1) {
        return Vector::Constant(config.p, s2);
    }
    const double scale = 2.0 / (1.0 + config.kappa);
    Vector v(config.p);
    for (Index j = 0; j < config.p; ++j) {
        v[j] = s2 * scale *
               (1.0 + (config.kappa - 1.0) * static_cast<double>(j) / static_cast<double>(config.p - 1));
    }
    return v;
}

Matrix generate_noise(const ExperimentConfig& config, Index n, Rng& rng) {
    const Vector sd = noise_variances(config).cwiseSqrt();
    std::normal_distribution<double> normal;
    Matrix noise(n, config.p);
    for (Index j = 0; j < config.p; ++j)
        for (Index i = 0; i < n; ++i) noise(i, j) = sd[j] * normal(rng);
    return noise;
}

double rmse(const Matrix& x_hat, const Matrix& x) {
    if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols()) {
        throw ShapeError("rmse: shape mismatch");
    }
    const double denom = x.norm();
    if (!(denom > 0.0)) {
        throw DomainError("rmse: reference matrix has zero norm");
    }
    return (x_hat - x).norm() / denom;
}

SimulatedData simulate(const ExperimentConfig& config, Index n, Rng& rng) {
    SimulatedData data;
    SignalDraw draw = generate_signals(config, n, rng);
    data.x = std::move(draw.x);
    data.signal = std::move(draw.model);
    data.mask = generate_masks(config, n, rng);
    data.noise_var = noise_variances(config);
    data.y = data.mask.cwiseProduct(data.x + generate_noise(config, n, rng));
    return data;
}

SimulatedData simulate_from(const ExperimentConfig& config, const SignalModel& signal, Index n,
                            Rng& rng) {
    config.validate();
    if (signal.u.rows() != config.p) throw ShapeError("signal model dimension differs from config");
    SimulatedData data;
    data.x = sample_signals(signal, n, rng);
    data.signal = signal;
    data.mask = generate_masks(config, n, rng);
    data.noise_var = noise_variances(config);
    data.y = data.mask.cwiseProduct(data.x + generate_noise(config, n, rng));
    return data;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    for (std::uint64_t id : ids) {
        h = mix(h ^ mix(id));
    }
    return h;
}

}  // namespace eblp
