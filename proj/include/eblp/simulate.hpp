#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eblp/linalg.hpp"

namespace eblp {

using Rng = std::mt19937_64;

/// Draws one standardized (mean 0, variance 1) signal score.
using ScoreSampler = std::function<double(Rng&)>;

enum class Sampling { Uniform, Linear };
enum class NoiseKind { White, Colored };

/// Low-rank signal X_i = mean + sum_k sqrt(ell_k) z_ik u_k.
struct SignalModel {
    Vector ell;   // r, strictly decreasing
    Matrix u;     // p x r, orthonormal columns
    Vector mean;  // p (zeros when absent)
};

/// One simulation setting, matching the missing-data protocol: spiked
/// signal, coordinate-selection masks, white or colored Gaussian noise.
struct ExperimentConfig {
    Index p = 300;
    double gamma = 0.8;
    std::vector<double> ell = {10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    /// Number of nonzero coordinates shared by all PCs; dense when empty.
    std::optional<Index> sparsity;
    Sampling sampling = Sampling::Uniform;
    double delta = 1.0;
    NoiseKind noise = NoiseKind::White;
    double sigma = 1.0;
    double kappa = 1.0;
    bool random_mean = false;
    Index replicates = 1;
    std::uint64_t seed = 1;

    /// Sample count round(p / gamma).
    Index n() const;
    /// Throws DomainError on invalid settings.
    void validate() const;
};

struct SignalDraw {
    Matrix x;  // n x p
    SignalModel model;
};

SignalDraw generate_signals(const ExperimentConfig& config, Index n, Rng& rng,
                            const ScoreSampler& scores = {});

/// n fresh signals from a fixed model.
Matrix sample_signals(const SignalModel& model, Index n, Rng& rng, const ScoreSampler& scores = {});

/// Per-column selection probabilities.
Vector column_probabilities(const ExperimentConfig& config);

/// n x p 0/1 selection masks.
Matrix generate_masks(const ExperimentConfig& config, Index n, Rng& rng);

/// Per-coordinate noise variances; sum to sigma^2 p, max/min = kappa.
Vector noise_variances(const ExperimentConfig& config);

Matrix generate_noise(const ExperimentConfig& config, Index n, Rng& rng);

/// ||x_hat - x||_F / ||x||_F.
double rmse(const Matrix& x_hat, const Matrix& x);

/// A complete simulated missing-data problem.
struct SimulatedData {
    Matrix x;         // clean signals
    Matrix y;         // observed values, 0 where unobserved
    Matrix mask;      // 0/1
    SignalModel signal;
    Vector noise_var;  // per-coordinate noise variance
};

SimulatedData simulate(const ExperimentConfig& config, Index n, Rng& rng);

/// New samples, masks and noise sharing an existing signal model.
SimulatedData simulate_from(const ExperimentConfig& config, const SignalModel& signal, Index n,
                            Rng& rng);

/// Mixes identifiers into a seed (splitmix64 finalizer chain).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids);

}  // namespace eblp
