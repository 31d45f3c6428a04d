#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eblp/errors.hpp"
#include "eblp/spectral.hpp"
#include "oracles.hpp"

using namespace eblp;

namespace {

using Rng = std::mt19937_64;

EigenSpectrum white_noise_spectrum(Index n, Index p, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix noise(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) noise(i, j) = normal(rng);
    return EigenSpectrum::from_singular_values(singular_values(noise / std::sqrt(double(n))), n, p);
}

}  // namespace

TEST(EmpiricalStieltjes, SingleEigenvalue) {
    EigenSpectrum s({1.0}, 1, 1);
    EXPECT_DOUBLE_EQ(empirical_stieltjes(s, 0, 0.0), 1.0);
}

TEST(EmpiricalStieltjes, UnsortedInputIsSorted) {
    EigenSpectrum s({2.0, 4.0}, 2, 2);
    EXPECT_EQ(s.values().front(), 4.0);
    EXPECT_DOUBLE_EQ(empirical_stieltjes(s, 0, 6.0), -0.375);
}

TEST(EmpiricalStieltjes, TopEigenvaluesExcluded) {
    EigenSpectrum s({10.0, 4.0, 2.0}, 3, 3);
    EXPECT_DOUBLE_EQ(empirical_stieltjes(s, 1, 6.0), -0.375);
}

TEST(EmpiricalStieltjes, ImplicitZerosCountWhenDimensionExceedsSamples) {
    // n = 2, p = 4: eigenvalues {3, 1, 0, 0}
    EigenSpectrum s({3.0, 1.0}, 2, 4);
    EXPECT_EQ(s.implicit_zeros(), 2);
    const double expected = (1.0 / (3.0 - 5.0) + 1.0 / (1.0 - 5.0) + 2.0 / (0.0 - 5.0)) / 4.0;
    EXPECT_NEAR(empirical_stieltjes(s, 0, 5.0), expected, 1e-15);
    const double expected_r1 = (1.0 / (1.0 - 5.0) + 2.0 / (0.0 - 5.0)) / 3.0;
    EXPECT_NEAR(empirical_stieltjes(s, 1, 5.0), expected_r1, 1e-15);
}

TEST(EmpiricalStieltjes, RejectsPointInsideBulk) {
    EigenSpectrum s({10.0, 4.0, 2.0}, 3, 3);
    EXPECT_THROW(empirical_stieltjes(s, 1, 3.0), DomainError);
    EXPECT_THROW(empirical_stieltjes(s, 1, 4.0), DomainError);
    EXPECT_NO_THROW(empirical_stieltjes(s, 1, 4.0 + 1e-6));
}

TEST(EmpiricalStieltjes, RejectsRankWithoutResidual) {
    EigenSpectrum s({10.0, 4.0, 2.0}, 3, 3);
    EXPECT_THROW(empirical_stieltjes(s, 3, 20.0), RankError);
    EXPECT_THROW(empirical_stieltjes_derivative(s, 5, 20.0), RankError);
}

TEST(EmpiricalStieltjes, ExclusionInvariance) {
    std::vector<double> base = {50.0, 20.0, 3.0, 2.5, 1.0, 0.2};
    EigenSpectrum a(base, 6, 6);
    base[0] = 1000.0;
    base[1] = 7.0;
    EigenSpectrum b(base, 6, 6);
    for (double x : {4.0, 6.0, 100.0}) {
        EXPECT_EQ(empirical_stieltjes(a, 2, x), empirical_stieltjes(b, 2, x));
        EXPECT_EQ(empirical_stieltjes_derivative(a, 2, x), empirical_stieltjes_derivative(b, 2, x));
    }
}

TEST(EmpiricalStieltjes, IncreasingAndTendsToZeroFromBelow) {
    const EigenSpectrum s = white_noise_spectrum(250, 200, 11);
    const double top = s.residual_top(0);
    double prev = empirical_stieltjes(s, 0, top + 1e-3);
    for (double x = top + 0.01; x < top + 50.0; x *= 1.05) {
        const double m = empirical_stieltjes(s, 0, x);
        EXPECT_GT(m, prev);
        EXPECT_LT(m, 0.0);
        prev = m;
    }
    EXPECT_GT(empirical_stieltjes(s, 0, 1e9), -1e-8);
}

TEST(EmpiricalStieltjesDerivative, Examples) {
    EXPECT_DOUBLE_EQ(empirical_stieltjes_derivative(EigenSpectrum({1.0}, 1, 1), 0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(empirical_stieltjes_derivative(EigenSpectrum({4.0, 2.0}, 2, 2), 0, 6.0), 0.15625);
    EXPECT_DOUBLE_EQ(empirical_stieltjes_derivative(EigenSpectrum({10.0, 4.0, 2.0}, 3, 3), 1, 6.0),
                     0.15625);
}

TEST(EmpiricalStieltjesDerivative, MatchesCentredDifferences) {
    const EigenSpectrum s = white_noise_spectrum(300, 240, 5);
    const double edge = s.residual_top(2);
    for (double x : {edge + 0.5, edge + 1.0, 2.0 * edge, 10.0 * edge}) {
        const double h = 1e-4 * x;
        const double fd =
            (empirical_stieltjes(s, 2, x + h) - empirical_stieltjes(s, 2, x - h)) / (2.0 * h);
        const double exact = empirical_stieltjes_derivative(s, 2, x);
        EXPECT_GT(exact, 0.0);
        EXPECT_LT(std::abs(fd - exact) / exact, 1e-6) << "x = " << x;
    }
}

TEST(CompanionStieltjes, Examples) {
    EXPECT_DOUBLE_EQ(companion_stieltjes(-0.375, 6.0, 1.0), -0.375);
    EXPECT_NEAR(companion_stieltjes(-0.375, 6.0, 0.5), -0.5 * 0.375 - 0.5 / 6.0, 1e-15);
    EXPECT_NEAR(companion_stieltjes(-0.375, 6.0, 0.5), -0.27083, 1e-5);
    EXPECT_DOUBLE_EQ(companion_stieltjes(-1.0, 1.0, 2.0), -1.0);
    EXPECT_THROW(companion_stieltjes(-1.0, 0.0, 2.0), DomainError);
}

TEST(CompanionStieltjes, DerivativeMatchesDifferences) {
    const double gamma = 1.7;
    const auto m = [](double x) { return -1.0 / (x - 1.0); };
    for (double x : {2.0, 3.5, 9.0}) {
        const double h = 1e-5;
        const double fd = (companion_stieltjes(m(x + h), x + h, gamma) -
                           companion_stieltjes(m(x - h), x - h, gamma)) /
                          (2.0 * h);
        const double m_prime = 1.0 / ((x - 1.0) * (x - 1.0));
        EXPECT_NEAR(companion_stieltjes_derivative(m_prime, x, gamma), fd, 1e-7);
    }
}

TEST(DTransform, Examples) {
    EXPECT_DOUBLE_EQ(d_transform(4.0, -0.5, -0.5), 1.0);
    EXPECT_DOUBLE_EQ(d_transform(1.0, 0.0, -1.0), 0.0);
    EXPECT_NEAR(d_transform(6.0, -0.375, -0.27083), 0.60938, 5e-5);
}

TEST(DTransformDerivative, Examples) {
    EXPECT_DOUBLE_EQ(d_transform_derivative(0.0, -1.0, -1.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(d_transform_derivative(4.0, -0.5, -0.5, 0.25, 0.25), -0.75);
    EXPECT_DOUBLE_EQ(d_transform_derivative(2.5, -0.3, -0.7, 0.2, 0.9),
                     d_transform_derivative(2.5, -0.7, -0.3, 0.9, 0.2));
}

TEST(DTransform, DecreasingAboveBulk) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const EigenSpectrum s = white_noise_spectrum(200, 300, seed);
        const double top = s.residual_top(1);
        double prev = spectral_estimates(s, 1, top + 1e-4).d_hat;
        for (double x = top + 1e-3; x < 100.0 * top; x *= 1.1) {
            const SpectralEstimates e = spectral_estimates(s, 1, x);
            EXPECT_LT(e.d_hat, prev);
            EXPECT_LT(e.d_prime_hat, 0.0);
            EXPECT_LT(e.m_hat, 0.0);
            EXPECT_LT(e.m_comp_hat, 0.0);
            EXPECT_GT(e.d_hat, 0.0);
            EXPECT_DOUBLE_EQ(e.d_hat, x * e.m_hat * e.m_comp_hat);
            prev = e.d_hat;
        }
    }
}

TEST(SpectralEstimates, CompanionRelationHoldsExactly) {
    const EigenSpectrum s = white_noise_spectrum(150, 100, 4);
    const double x = s.residual_top(0) + 0.7;
    const SpectralEstimates e = spectral_estimates(s, 0, x);
    EXPECT_EQ(e.m_comp_hat, companion_stieltjes(e.m_hat, x, s.gamma()));
}

TEST(MpWhiteStieltjes, MatchesQuadrature) {
    for (double gamma : {0.25, 0.8, 1.0, 1.5, 3.0}) {
        const double edge = mp_upper_edge(gamma);
        for (double x : {edge + 1e-3, edge + 0.5, edge + 3.0, 4.0 * edge}) {
            const double closed = mp_white_stieltjes(x, gamma);
            const double numeric = oracle::mp_stieltjes_quadrature(x, gamma);
            EXPECT_LT(closed, 0.0);
            EXPECT_NEAR(closed, numeric, 2e-4 * std::max(1.0, std::abs(numeric)))
                << "gamma = " << gamma << ", x = " << x;
        }
    }
}

TEST(MpWhiteStieltjes, EdgeValueAtUnitRatio) {
    // Quadrature and closed form agree at x = 4, gamma = 1 on -1/2.
    EXPECT_NEAR(mp_white_stieltjes(4.0, 1.0), -0.5, 1e-12);
    EXPECT_NEAR(oracle::mp_stieltjes_quadrature(4.0, 1.0), -0.5, 1e-3);
}

TEST(MpWhiteStieltjes, RejectsPointInsideBulk) {
    EXPECT_THROW(mp_white_stieltjes(3.0, 1.0), DomainError);
}

TEST(MpWhiteStieltjes, AgreesWithPlugInOnSimulatedNoise) {
    const EigenSpectrum s = white_noise_spectrum(625, 500, 21);
    const double gamma = 0.8;
    for (double x : {mp_upper_edge(gamma) + 1.0, 10.0}) {
        EXPECT_NEAR(empirical_stieltjes(s, 0, x), mp_white_stieltjes(x, gamma), 0.01) << x;
    }
}
