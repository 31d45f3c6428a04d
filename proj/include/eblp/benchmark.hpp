#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eblp/simulate.hpp"

namespace eblp {

enum class Method {
    Eblp,         // whitened plug-in EBLP
    EblpWhite,    // whitened, closed-form white-noise shrinkage
    Unwhitened,   // plug-in shrinkage of B M^-1 without whitening
    Nnrls,        // nuclear-norm regression, column-weighted under uneven sampling
    OutOfSample,  // EBLP fitted in-sample, applied to a fresh draw of the same model
};

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// One [experiment NAME] section: a grid of noise levels times replicates.
struct BenchmarkExperiment {
    std::string id;
    ExperimentConfig config;  // config.sigma is overridden by each grid point
    std::vector<double> sigmas = {1.0};
    std::vector<Method> methods = {Method::Eblp};
    std::optional<Index> rank;  // number of spikes when absent
    /// EBLP whitening uses the true noise shape when colored.
    bool known_noise_profile = true;
    Index nnrls_max_iters = 500;
    double nnrls_tol = 1e-7;
    /// Monte Carlo draws for the NNRLS weight when it has no closed form.
    Index weight_replicates = 5;
    /// Samples in the fresh out-of-sample draw; n when absent.
    std::optional<Index> n_out;

    Index effective_rank() const;
};

struct BenchmarkConfig {
    std::uint64_t seed = 1;
    std::vector<BenchmarkExperiment> experiments;
};

/// Flat `key = value` text with `[experiment NAME]` sections, '#' comments.
/// Unknown keys are collected and reported together in one ParseError.
BenchmarkConfig parse_benchmark_config(std::istream& in);
BenchmarkConfig parse_benchmark_config_file(const std::string& path);

struct ResultRow {
    std::string experiment;
    std::string method;
    double sigma = 0.0;
    double delta = 1.0;
    double kappa = 1.0;
    std::string sparsity;  // "dense" or the support size
    std::string sampling;
    std::string noise;
    Index p = 0;
    Index n = 0;
    Index replicate = 0;
    double rmse = 0.0;
    std::optional<double> seconds;
    std::optional<double> amse;
};

/// Column order of the results table.
const std::vector<std::string>& result_columns();

struct RunOptions {
    unsigned jobs = 1;
    bool timing = true;
};

/// Rows ordered by experiment, sigma, replicate, then method as configured.
std::vector<ResultRow> run_benchmark(const BenchmarkConfig& config, const RunOptions& opts = {});

/// Dataset of one grid point, identical to the one the benchmark run uses.
SimulatedData simulate_grid_point(const BenchmarkConfig& config, std::size_t experiment,
                                  std::size_t sigma_index, Index replicate);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(std::istream& in);

}  // namespace eblp
