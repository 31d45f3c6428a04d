#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eblp/errors.hpp"
#include "eblp/shrinkage.hpp"
#include "eblp/simulate.hpp"
#include "oracles.hpp"

using namespace eblp;

namespace {

Matrix gaussian(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> normal;
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
}

Matrix random_orthogonal(Index size, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(size, size, rng));
    return qr.householderQ() * Matrix::Identity(size, size);
}

// White-noise spiked data with unit noise: rows sqrt(ell) z u^T + noise.
SimulatedData white_spiked(Index p, double gamma, std::vector<double> ell, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.p = p;
    cfg.gamma = gamma;
    cfg.ell = std::move(ell);
    Rng rng(seed);
    return simulate(cfg, cfg.n(), rng);
}

}  // namespace

TEST(EstimateSpike, AtGuardBoundaryIsSubcritical) {
    EigenSpectrum s({3.0, 3.0, 1.0, 0.5}, 4, 4);
    const SpikeEstimate est = estimate_spike(s, 1, 0);
    EXPECT_FALSE(est.supercritical);
    EXPECT_EQ(est.lambda_star, 0.0);
    EXPECT_EQ(est.c2_hat, 0.0);
    EXPECT_EQ(est.ct2_hat, 0.0);
    EXPECT_EQ(est.ell_hat, 0.0);
}

TEST(EstimateSpike, RejectsComponentBeyondRank) {
    EigenSpectrum s({9.0, 3.0, 1.0}, 3, 3);
    EXPECT_THROW(estimate_spike(s, 1, 1), RankError);
    EXPECT_THROW(estimate_spike(s, 1, -1), RankError);
}

TEST(EstimateSpike, RecoversWhiteSpikeFromNoiseBulk) {
    // Pure-noise bulk with gamma = 1, p = 2000 and a spike planted at 4.5.
    const Index p = 2000;
    Rng rng(99);
    const Matrix noise = gaussian(p, p, rng) / std::sqrt(double(p));
    const Vector sv = singular_values(noise);
    std::vector<double> values(static_cast<std::size_t>(p));
    for (Index k = 0; k < p; ++k) values[static_cast<std::size_t>(k)] = sv[k] * sv[k];
    values[0] = 4.5;
    const EigenSpectrum s(values, p, p);
    const SpikeEstimate est = estimate_spike(s, 1, 0);
    ASSERT_TRUE(est.supercritical);
    EXPECT_NEAR(est.ell_hat, 2.0, 0.05 * 2.0);
    EXPECT_NEAR(est.c2_hat, 0.5, 0.05 * 0.5);
    EXPECT_NEAR(est.ct2_hat, 0.5, 0.05 * 0.5);
}

TEST(EstimateSpike, CosinesInUnitIntervalWhenSupercritical) {
    const SimulatedData sim = white_spiked(200, 0.5, {9, 5, 2.5}, 3);
    const Index n = sim.y.rows();
    const EigenSpectrum s = EigenSpectrum::from_singular_values(
        singular_values(sim.y / std::sqrt(double(n))), n, 200);
    for (Index k = 0; k < 3; ++k) {
        const SpikeEstimate est = estimate_spike(s, 3, k);
        ASSERT_TRUE(est.supercritical) << k;
        EXPECT_GT(est.c2_hat, 0.0);
        EXPECT_LE(est.c2_hat, 1.0);
        EXPECT_GT(est.ct2_hat, 0.0);
        EXPECT_LE(est.ct2_hat, 1.0);
        EXPECT_DOUBLE_EQ(est.lambda_star,
                         std::sqrt(est.ell_hat) * std::sqrt(est.c2_hat) * std::sqrt(est.ct2_hat));
    }
}

TEST(OptimalLambda, Examples) {
    SpikeEstimate est;
    est.supercritical = true;
    est.ell_hat = 2.0;
    est.c2_hat = 0.5;
    est.ct2_hat = 0.5;
    EXPECT_NEAR(optimal_lambda(est), 0.70711, 1e-5);
    est.ell_hat = 1.0;
    est.c2_hat = 1.0;
    est.ct2_hat = 1.0;
    EXPECT_DOUBLE_EQ(optimal_lambda(est), 1.0);
    est.c2_hat = 0.0;
    EXPECT_EQ(optimal_lambda(est), 0.0);
    EXPECT_EQ(optimal_lambda(SpikeEstimate{}), 0.0);
}

TEST(Amse, Examples) {
    SpikeEstimate a;
    a.ell_hat = 2.0;
    a.c2_hat = 0.5;
    a.ct2_hat = 0.5;
    EXPECT_DOUBLE_EQ(amse(std::vector<SpikeEstimate>{a}), 1.5);
    SpikeEstimate perfect;
    perfect.ell_hat = 3.0;
    perfect.c2_hat = 1.0;
    perfect.ct2_hat = 1.0;
    EXPECT_DOUBLE_EQ(amse(std::vector<SpikeEstimate>{perfect}), 0.0);
    SpikeEstimate lost;
    lost.ell_hat = 0.7;
    EXPECT_DOUBLE_EQ(amse(std::vector<SpikeEstimate>{a, lost}), 1.5 + 0.7);
}

TEST(WhiteSpike, ForwardExamples) {
    const double gamma = 0.64;
    const WhiteSpike edge = white_spike_forward(std::sqrt(gamma), gamma);
    EXPECT_DOUBLE_EQ(edge.lambda_emp, (1.0 + 0.8) * (1.0 + 0.8));
    EXPECT_EQ(edge.c2, 0.0);
    EXPECT_EQ(edge.ct2, 0.0);

    const WhiteSpike a = white_spike_forward(2.0, 1.0);
    EXPECT_DOUBLE_EQ(a.lambda_emp, 4.5);
    EXPECT_DOUBLE_EQ(a.c2, 0.5);
    EXPECT_DOUBLE_EQ(a.ct2, 0.5);

    const WhiteSpike b = white_spike_forward(1.0, 0.5);
    EXPECT_DOUBLE_EQ(b.lambda_emp, 3.0);
    EXPECT_NEAR(b.c2, 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(b.ct2, 0.25);
}

TEST(WhiteSpike, InverseExamples) {
    EXPECT_DOUBLE_EQ(white_spike_inverse(4.5, 1.0), 2.0);
    for (double gamma : {0.3, 1.0, 2.0}) {
        EXPECT_EQ(white_spike_inverse(mp_upper_edge(gamma), gamma), 0.0);
        EXPECT_EQ(white_spike_inverse(0.5 * mp_upper_edge(gamma), gamma), 0.0);
    }
}

TEST(WhiteSpike, InverseRoundTrip) {
    for (double gamma : {0.1, 0.5, 0.8, 1.0, 2.0, 5.0}) {
        for (double t = 1.001; t < 200.0; t *= 1.3) {
            const double ell = t * std::sqrt(gamma);
            const double back = white_spike_inverse(white_spike_forward(ell, gamma).lambda_emp, gamma);
            EXPECT_NEAR(back, ell, 1e-9 * ell) << "gamma = " << gamma;
        }
    }
}

TEST(WhiteSpike, OuterCosineIdentity) {
    for (double gamma : {0.2, 0.8, 1.0, 3.0}) {
        for (double t = 1.01; t < 100.0; t *= 1.5) {
            const double ell = t * std::sqrt(gamma);
            const WhiteSpike w = white_spike_forward(ell, gamma);
            EXPECT_NEAR(1.0 / w.ct2, 1.0 + 1.0 / (ell * w.c2), 1e-12 / w.ct2);
        }
    }
}

TEST(WhiteSpike, ShrinkerMatchesFrobeniusOptimalRule) {
    // Unit noise, gamma < 1: sqrt(ell) c c~ equals the classical optimal shrinker.
    for (double gamma : {0.2, 0.5, 0.8}) {
        const double edge = 1.0 + std::sqrt(gamma);
        for (double y = edge * 1.0001; y < 20.0; y *= 1.07) {
            const SpikeEstimate est = estimate_white_spike(y, gamma, 1.0, 0.0);
            ASSERT_TRUE(est.supercritical);
            EXPECT_NEAR(est.lambda_star, oracle::frobenius_shrinker(y, gamma), 1e-10 * y)
                << "gamma = " << gamma << ", y = " << y;
        }
    }
}

TEST(ShrinkMatrix, ZeroMatrix) {
    const Matrix zero = Matrix::Zero(40, 30);
    for (ShrinkMode mode : {ShrinkMode::Plugin, ShrinkMode::White}) {
        ShrinkOptions opts;
        opts.mode = mode;
        const ShrinkResult res = shrink_matrix(zero, 3, opts);
        EXPECT_EQ(res.denoised.norm(), 0.0);
        for (const auto& est : res.estimates) EXPECT_FALSE(est.supercritical);
    }
}

TEST(ShrinkMatrix, SubcriticalRankOneShrinksToZero) {
    const Index n = 375;
    const Index p = 300;
    Rng rng(17);
    Matrix m = gaussian(n, p, rng);
    Vector u = gaussian(p, 1, rng).col(0).normalized();
    Vector v = gaussian(n, 1, rng).col(0).normalized();
    // Singular value of m / sqrt(n) added: 0.5, well below the edge 1 + sqrt(0.8).
    m += std::sqrt(double(n)) * 0.5 * v * u.transpose();
    for (ShrinkMode mode : {ShrinkMode::Plugin, ShrinkMode::White}) {
        ShrinkOptions opts;
        opts.mode = mode;
        const ShrinkResult res = shrink_matrix(m, 1, opts);
        EXPECT_EQ(res.denoised.norm(), 0.0);
    }
}

TEST(ShrinkMatrix, RejectsRankBeyondDimensions) {
    const Matrix m = Matrix::Ones(5, 4);
    EXPECT_THROW(shrink_matrix(m, 5), RankError);
    ShrinkOptions plugin;
    EXPECT_THROW(shrink_matrix(m, 4, plugin), RankError);
}

TEST(ShrinkMatrix, SingleSpikeNearGridOracle) {
    const SimulatedData sim = white_spiked(300, 0.8, {5}, 7);
    for (ShrinkMode mode : {ShrinkMode::Plugin, ShrinkMode::White}) {
        ShrinkOptions opts;
        opts.mode = mode;
        const ShrinkResult res = shrink_matrix(sim.y, 1, opts);
        const double sigma1 = res.estimates[0].sigma_obs;
        const auto grid = oracle::grid_shrinkage(res.u_hat, res.v_hat, sim.x, sigma1, 1e-3 * sigma1);
        const double err = (res.denoised - sim.x).norm();
        EXPECT_LE(err, 1.03 * grid.best_error);
    }
}

TEST(ShrinkMatrix, ShrinkageIsDownward) {
    const SimulatedData sim = white_spiked(300, 0.8, {10, 6, 3, 1.5}, 8);
    for (ShrinkMode mode : {ShrinkMode::Plugin, ShrinkMode::White}) {
        ShrinkOptions opts;
        opts.mode = mode;
        const ShrinkResult res = shrink_matrix(sim.y, 4, opts);
        for (const auto& est : res.estimates) {
            EXPECT_LE(est.lambda_star, est.sigma_obs);
            EXPECT_LE(est.ell_hat, est.sigma_obs * est.sigma_obs);
        }
    }
}

TEST(ShrinkMatrix, WhiteModeOrthogonalInvariance) {
    const SimulatedData sim = white_spiked(120, 0.6, {8, 4}, 10);
    const Index n = sim.y.rows();
    Rng rng(77);
    const Matrix left = random_orthogonal(n, rng);
    const Matrix right = random_orthogonal(120, rng);
    ShrinkOptions opts;
    opts.mode = ShrinkMode::White;
    const ShrinkResult a = shrink_matrix(sim.y, 2, opts);
    const ShrinkResult b = shrink_matrix(left * sim.y * right, 2, opts);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(a.estimates[k].lambda_star, b.estimates[k].lambda_star,
                    1e-10 * a.estimates[k].sigma_obs);
    }
}

TEST(ShrinkMatrix, WhiteModeCosineIdentityExact) {
    const SimulatedData sim = white_spiked(300, 0.8, {10, 8, 6, 4, 2}, 12);
    ShrinkOptions opts;
    opts.mode = ShrinkMode::White;
    const ShrinkResult res = shrink_matrix(sim.y, 5, opts);
    for (const auto& est : res.estimates) {
        if (!est.supercritical) continue;
        // ell_hat is in data units; the identity is scale free once divided by the noise level.
        const double ell = est.ell_hat / res.noise_variance;
        EXPECT_NEAR(1.0 / est.ct2_hat, 1.0 + 1.0 / (ell * est.c2_hat), 1e-12 / est.ct2_hat);
    }
}

TEST(ShrinkMatrix, TruncatedAndFullBackendsAgree) {
    const SimulatedData sim = white_spiked(300, 0.8, {10, 5, 2}, 13);
    ShrinkOptions full;
    full.mode = ShrinkMode::White;
    full.backend = SvdBackend::Full;
    ShrinkOptions trunc = full;
    trunc.backend = SvdBackend::Truncated;
    const ShrinkResult a = shrink_matrix(sim.y, 3, full);
    const ShrinkResult b = shrink_matrix(sim.y, 3, trunc);
    EXPECT_LT((a.denoised - b.denoised).norm(), 1e-7 * a.denoised.norm());
}

TEST(ShrinkMatrix, AmseMatchesRealizedErrorOnAverage) {
    double est_sum = 0.0;
    double real_sum = 0.0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const SimulatedData sim = white_spiked(300, 0.8, {10, 8, 6, 4, 2}, 1000 + rep);
        const ShrinkResult res = shrink_matrix(sim.y, 5);
        est_sum += amse(res.estimates);
        real_sum += (res.denoised - sim.x).squaredNorm() / double(sim.y.rows());
    }
    EXPECT_NEAR(est_sum / real_sum, 1.0, 0.05);
}

TEST(SuggestRank, CountsClearSpikes) {
    const SimulatedData sim = white_spiked(300, 0.8, {20, 10, 5}, 14);
    EXPECT_EQ(suggest_rank(sim.y), 3);
    Rng rng(5);
    EXPECT_EQ(suggest_rank(gaussian(375, 300, rng)), 0);
}
