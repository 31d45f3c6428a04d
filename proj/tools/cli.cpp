#include "eblp/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "eblp/benchmark.hpp"
#include "eblp/errors.hpp"
#include "eblp/matrix_io.hpp"
#include "eblp/model_io.hpp"
#include "eblp/pipeline.hpp"

namespace eblp::cli {

namespace {

struct DenoiseArgs {
    std::string input;
    std::string output;
    std::string mask;
    std::string report;
    std::string save_model;
    std::string rank = "1";
    std::string mode = "plugin";
    bool whiten = true;
    bool center = true;
    std::optional<double> noise_variance;
    std::optional<double> margin;
};

struct OosArgs {
    std::string model;
    std::string input;
    std::string output;
    std::string mask;
};

struct BenchmarkArgs {
    std::string config;
    std::string output;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;
};

struct SimulateArgs {
    std::string config;
    std::string experiment;
    std::string prefix;
    std::size_t sigma_index = 0;
    Index replicate = 0;
    std::optional<std::uint64_t> seed;
};

/// Observed entries are those present in the file and (when given) set in the mask file.
Dataset read_dataset(const std::string& input, const std::string& mask_path,
                     const TextMatrixOptions& io) {
    TextMatrix text = read_matrix_file(input, io);
    if (!mask_path.empty()) {
        const TextMatrix mask = read_matrix_file(mask_path, io);
        if (mask.values.rows() != text.values.rows() || mask.values.cols() != text.values.cols()) {
            throw ShapeError("mask is " + std::to_string(mask.values.rows()) + "x" +
                             std::to_string(mask.values.cols()) + " but input is " +
                             std::to_string(text.values.rows()) + "x" +
                             std::to_string(text.values.cols()));
        }
        if ((mask.observed.array() == 0.0).any() ||
            ((mask.values.array() != 0.0) && (mask.values.array() != 1.0)).any()) {
            throw ParseError("mask entries must be 0 or 1");
        }
        text.observed = text.observed.cwiseProduct(mask.values);
    }
    Dataset data;
    data.y = text.values.cwiseProduct(text.observed);
    data.d = std::move(text.observed);
    return data;
}

void write_report(const std::string& path, const FitResult& fit, const Dataset& data,
                  const DenoiseArgs& args) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    const EblpModel& m = fit.model;
    out << "# n = " << data.n() << ", p = " << data.p() << ", rank = " << m.rank
        << ", mode = " << args.mode << ", whitened = " << (m.whitened ? "true" : "false") << '\n';
    out << "# noise_variance = " << format_double(m.noise_variance) << '\n';
    out << "# amse = " << format_double(m.amse()) << '\n';
    out << "component,ell_hat,c2_hat,ct2_hat,lambda_star,sigma_obs,supercritical,clamped\n";
    for (std::size_t k = 0; k < m.estimates.size(); ++k) {
        const auto& e = m.estimates[k];
        out << (k + 1) << ',' << format_double(e.ell_hat) << ',' << format_double(e.c2_hat) << ','
            << format_double(e.ct2_hat) << ',' << format_double(e.lambda_star) << ','
            << format_double(e.sigma_obs) << ',' << (e.supercritical ? 1 : 0) << ','
            << (e.clamped ? 1 : 0) << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

int cmd_denoise(const DenoiseArgs& args, const TextMatrixOptions& io, std::ostream& out) {
    const Dataset data = read_dataset(args.input, args.mask, io);
    FitOptions opts;
    opts.whiten = args.whiten;
    opts.center = args.center;
    opts.mode = args.mode == "white" ? ShrinkMode::White : ShrinkMode::Plugin;
    opts.noise_variance = args.noise_variance;
    opts.detection_margin = args.margin;
    if (data.n() == 0 || data.p() == 0) throw ParseError("input matrix is empty");
    if (args.rank == "auto") {
        opts.rank = suggest_rank(data, opts);
    } else {
        long long r = 0;
        try {
            r = std::stoll(args.rank);
        } catch (const std::exception&) {
            throw ParseError("--rank must be a positive integer or 'auto'");
        }
        if (r < 1) throw RankError("--rank must be at least 1");
        opts.rank = static_cast<Index>(r);
    }
    const FitResult fit = fit_in_sample(data, opts);
    write_matrix_file(args.output, fit.x_hat, io);
    write_report(args.report.empty() ? args.output + ".report" : args.report, fit, data, args);
    if (!args.save_model.empty()) save_model_file(args.save_model, fit.model);
    out << "denoised " << data.n() << "x" << data.p() << " at rank " << opts.rank << ", amse "
        << format_double(fit.model.amse()) << '\n';
    return kOk;
}

int cmd_oos(const OosArgs& args, const TextMatrixOptions& io) {
    const EblpModel model = load_model_file(args.model);
    const Dataset data = read_dataset(args.input, args.mask, io);
    if (data.n() == 0) {
        write_matrix_file(args.output, Matrix(0, model.p()), io);
        return kOk;
    }
    write_matrix_file(args.output, predict_out_of_sample(model, data), io);
    return kOk;
}

int cmd_benchmark(const BenchmarkArgs& args, std::ostream& out) {
    BenchmarkConfig config = parse_benchmark_config_file(args.config);
    if (args.seed) config.seed = *args.seed;
    RunOptions opts;
    opts.jobs = args.jobs;
    opts.timing = !args.no_timing;
    const auto rows = run_benchmark(config, opts);
    std::ofstream file(args.output);
    if (!file) throw Error("cannot write " + args.output);
    write_results(file, rows);
    if (!file) throw Error("write failed: " + args.output);
    out << "wrote " << rows.size() << " rows to " << args.output << '\n';
    return kOk;
}

int cmd_simulate(const SimulateArgs& args, const TextMatrixOptions& io) {
    BenchmarkConfig config = parse_benchmark_config_file(args.config);
    if (args.seed) config.seed = *args.seed;
    std::size_t index = config.experiments.size();
    for (std::size_t e = 0; e < config.experiments.size(); ++e) {
        if (config.experiments[e].id == args.experiment) index = e;
    }
    if (index == config.experiments.size()) {
        throw DomainError("no experiment named '" + args.experiment + "'");
    }
    const SimulatedData sim = simulate_grid_point(config, index, args.sigma_index, args.replicate);
    write_matrix_file(args.prefix + ".observed.txt", sim.y, io, &sim.mask);
    write_matrix_file(args.prefix + ".truth.txt", sim.x, io);
    write_matrix_file(args.prefix + ".mask.txt", sim.mask, io);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Empirical best linear prediction for missing and transformed data", "eblp"};
    app.require_subcommand(1);
    std::string na_token = "NA";
    app.add_option("--na-token", na_token, "Token marking missing entries")->capture_default_str();

    DenoiseArgs dn;
    auto* denoise = app.add_subcommand("denoise", "Denoise an n x p matrix with missing entries");
    denoise->add_option("input", dn.input, "Input matrix, one sample per line")->required();
    denoise->add_option("-o,--output", dn.output, "Output matrix")->required();
    denoise->add_option("--mask", dn.mask, "0/1 mask file of observed entries");
    denoise->add_option("--rank", dn.rank, "Number of components, or 'auto'")->capture_default_str();
    denoise->add_flag("--whiten,!--no-whiten", dn.whiten, "Whiten the backprojected data");
    denoise->add_option("--mode", dn.mode, "Shrinkage estimator")
        ->check(CLI::IsMember({"plugin", "white"}))
        ->capture_default_str();
    denoise->add_flag("!--no-center", dn.center, "Do not subtract the available-case mean");
    denoise->add_option("--noise-variance", dn.noise_variance, "Known noise variance");
    denoise->add_option("--detection-margin", dn.margin, "Spike detection margin (Tracy-Widom units)");
    denoise->add_option("--report", dn.report, "Report path (default: OUTPUT.report)");
    denoise->add_option("--save-model", dn.save_model, "Write the fitted model as JSON");
    denoise->add_option("--na-token", na_token, "Token marking missing entries");

    OosArgs oa;
    auto* oos = app.add_subcommand("oos", "Apply a saved model to new samples");
    oos->add_option("--model", oa.model, "Model written by denoise --save-model")->required();
    oos->add_option("input", oa.input, "Input matrix")->required();
    oos->add_option("-o,--output", oa.output, "Output matrix")->required();
    oos->add_option("--mask", oa.mask, "0/1 mask file of observed entries");
    oos->add_option("--na-token", na_token, "Token marking missing entries");

    BenchmarkArgs ba;
    auto* bench = app.add_subcommand("benchmark", "Run a simulation grid and write a results table");
    bench->add_option("config", ba.config, "Benchmark config file")->required();
    bench->add_option("-o,--output", ba.output, "Results table")->required();
    bench->add_option("--jobs", ba.jobs, "Concurrent grid points")->check(CLI::PositiveNumber);
    bench->add_option("--seed", ba.seed, "Override the config seed");
    bench->add_flag("--no-timing", ba.no_timing, "Write NA instead of wall-clock seconds");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Write the dataset of one benchmark grid point");
    sim->add_option("config", sa.config, "Benchmark config file")->required();
    sim->add_option("--experiment", sa.experiment, "Experiment name")->required();
    sim->add_option("--sigma-index", sa.sigma_index, "Index into the sigma grid");
    sim->add_option("--replicate", sa.replicate, "Replicate index");
    sim->add_option("--seed", sa.seed, "Override the config seed");
    sim->add_option("--prefix", sa.prefix, "Writes PREFIX.{observed,truth,mask}.txt")->required();
    sim->add_option("--na-token", na_token, "Token marking missing entries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kParse;
    }

    TextMatrixOptions io;
    io.na_token = na_token;
    try {
        if (*denoise) return cmd_denoise(dn, io, out);
        if (*oos) return cmd_oos(oa, io);
        if (*bench) return cmd_benchmark(ba, out);
        if (*sim) return cmd_simulate(sa, io);
    } catch (const DegenerateCoordinateError& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kParse;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const RankError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidRank;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidRank;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace eblp::cli
