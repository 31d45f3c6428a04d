#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "eblp/baselines.hpp"
#include "eblp/benchmark.hpp"
#include "eblp/errors.hpp"
#include "eblp/model_io.hpp"
#include "eblp/pipeline.hpp"
#include "eblp/shrinkage.hpp"
#include "eblp/simulate.hpp"
#include "eblp/spectral.hpp"

namespace py = pybind11;
using namespace eblp;

namespace {

ShrinkMode parse_mode(const std::string& mode) {
    if (mode == "plugin") return ShrinkMode::Plugin;
    if (mode == "white") return ShrinkMode::White;
    throw DomainError("mode must be 'plugin' or 'white'");
}

py::dict row_dict(const ResultRow& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["method"] = r.method;
    d["sigma"] = r.sigma;
    d["delta"] = r.delta;
    d["kappa"] = r.kappa;
    d["sparsity"] = r.sparsity;
    d["sampling"] = r.sampling;
    d["noise"] = r.noise;
    d["p"] = r.p;
    d["n"] = r.n;
    d["replicate"] = r.replicate;
    d["rmse"] = r.rmse;
    d["seconds"] = r.seconds ? py::object(py::float_(*r.seconds)) : py::object(py::none());
    d["amse"] = r.amse ? py::object(py::float_(*r.amse)) : py::object(py::none());
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Empirical best linear prediction (C++ core)";

    // Registered base first: translators are tried newest first, so subclasses win.
    auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<RankError>(m, "RankError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<StateError>(m, "StateError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DegenerateCoordinateError>(m, "DegenerateCoordinateError", base.ptr());

    py::class_<SpikeEstimate>(m, "SpikeEstimate")
        .def_readonly("ell_hat", &SpikeEstimate::ell_hat)
        .def_readonly("c2_hat", &SpikeEstimate::c2_hat)
        .def_readonly("ct2_hat", &SpikeEstimate::ct2_hat)
        .def_readonly("lambda_star", &SpikeEstimate::lambda_star)
        .def_readonly("sigma_obs", &SpikeEstimate::sigma_obs)
        .def_readonly("supercritical", &SpikeEstimate::supercritical)
        .def_readonly("clamped", &SpikeEstimate::clamped)
        .def("__repr__", [](const SpikeEstimate& e) {
            std::ostringstream os;
            os << "SpikeEstimate(ell_hat=" << e.ell_hat << ", c2_hat=" << e.c2_hat
               << ", ct2_hat=" << e.ct2_hat << ", lambda_star=" << e.lambda_star << ")";
            return os.str();
        });

    py::class_<EblpModel>(m, "Model")
        .def_readonly("pcs", &EblpModel::u_hat)
        .def_readonly("estimates", &EblpModel::estimates)
        .def_readonly("m_hat", &EblpModel::m_hat)
        .def_readonly("w", &EblpModel::w)
        .def_readonly("mean", &EblpModel::mean)
        .def_readonly("noise_variance", &EblpModel::noise_variance)
        .def_readonly("oos_coefficients", &EblpModel::oos_coefficients)
        .def_readonly("rank", &EblpModel::rank)
        .def_readonly("whitened", &EblpModel::whitened)
        .def_property_readonly("p", &EblpModel::p)
        .def("amse", &EblpModel::amse)
        .def("save", [](const EblpModel& model, const std::string& path) { save_model_file(path, model); })
        .def_static("load", [](const std::string& path) { return load_model_file(path); });

    m.def(
        "fit",
        [](const Matrix& y, const Matrix& d, Index rank, bool whiten, const std::string& mode,
           bool center, std::optional<Vector> noise_profile, std::optional<double> noise_variance,
           std::optional<double> detection_margin, std::optional<Vector> m_override) {
            FitOptions opts;
            opts.rank = rank;
            opts.whiten = whiten;
            opts.mode = parse_mode(mode);
            opts.center = center;
            opts.noise_profile = std::move(noise_profile);
            opts.noise_variance = noise_variance;
            opts.detection_margin = detection_margin;
            opts.m_override = std::move(m_override);
            FitResult fit = fit_in_sample(Dataset{y, d}, opts);
            return py::make_tuple(fit.x_hat, fit.model);
        },
        py::arg("y"), py::arg("d"), py::arg("rank") = 1, py::arg("whiten") = true,
        py::arg("mode") = "plugin", py::arg("center") = true, py::arg("noise_profile") = py::none(),
        py::arg("noise_variance") = py::none(), py::arg("detection_margin") = py::none(),
        py::arg("m_override") = py::none(),
        "In-sample EBLP of rows y observed through diagonal transforms with A^T A = diag(d row). "
        "Returns (x_hat, model).");

    m.def(
        "predict",
        [](const EblpModel& model, const Matrix& y, const Matrix& d) {
            return predict_out_of_sample(model, Dataset{y, d});
        },
        py::arg("model"), py::arg("y"), py::arg("d"), "Out-of-sample EBLP with a fitted model.");

    m.def(
        "shrink",
        [](const Matrix& matrix, Index rank, const std::string& mode,
           std::optional<double> noise_variance) {
            ShrinkOptions opts;
            opts.mode = parse_mode(mode);
            opts.noise_variance = noise_variance;
            ShrinkResult r = shrink_matrix(matrix, rank, opts);
            return py::make_tuple(r.denoised, r.estimates);
        },
        py::arg("matrix"), py::arg("rank"), py::arg("mode") = "plugin",
        py::arg("noise_variance") = py::none(),
        "Optimal singular value shrinkage; returns (denoised, estimates).");

    m.def(
        "estimate_spikes",
        [](std::vector<double> eigenvalues, Index n, Index p, Index r) {
            const EigenSpectrum spectrum(std::move(eigenvalues), n, p);
            std::vector<SpikeEstimate> out;
            for (Index k = 0; k < r; ++k) out.push_back(estimate_spike(spectrum, r, k));
            return out;
        },
        py::arg("eigenvalues"), py::arg("n"), py::arg("p"), py::arg("r"),
        "Plug-in estimates for the top r spikes of an eigenvalue spectrum of n^-1 B^T B.");

    m.def(
        "empirical_stieltjes",
        [](std::vector<double> eigenvalues, Index n, Index p, Index r, double x) {
            return empirical_stieltjes(EigenSpectrum(std::move(eigenvalues), n, p), r, x);
        },
        py::arg("eigenvalues"), py::arg("n"), py::arg("p"), py::arg("r"), py::arg("x"));
    m.def("mp_white_stieltjes", &mp_white_stieltjes, py::arg("x"), py::arg("gamma"));
    m.def("mp_upper_edge", &mp_upper_edge, py::arg("gamma"));
    m.def(
        "white_spike_forward",
        [](double ell, double gamma) {
            const WhiteSpike s = white_spike_forward(ell, gamma);
            return py::make_tuple(s.lambda_emp, s.c2, s.ct2);
        },
        py::arg("ell"), py::arg("gamma"), "Returns (top eigenvalue, c^2, c~^2).");
    m.def("white_spike_inverse", &white_spike_inverse, py::arg("lambda_emp"), py::arg("gamma"));

    m.def(
        "simulate",
        [](Index p, double gamma, std::vector<double> ell, double delta, const std::string& sampling,
           double sigma, double kappa, std::optional<Index> sparsity, bool random_mean,
           std::uint64_t seed) {
            ExperimentConfig cfg;
            cfg.p = p;
            cfg.gamma = gamma;
            cfg.ell = std::move(ell);
            cfg.delta = delta;
            if (sampling == "linear") {
                cfg.sampling = Sampling::Linear;
            } else if (sampling != "uniform") {
                throw DomainError("sampling must be 'uniform' or 'linear'");
            }
            cfg.sigma = sigma;
            cfg.kappa = kappa;
            cfg.noise = kappa > 1.0 ? NoiseKind::Colored : NoiseKind::White;
            cfg.sparsity = sparsity;
            cfg.random_mean = random_mean;
            Rng rng(seed);
            const SimulatedData sim = simulate(cfg, cfg.n(), rng);
            py::dict out;
            out["x"] = sim.x;
            out["y"] = sim.y;
            out["mask"] = sim.mask;
            out["pcs"] = sim.signal.u;
            out["ell"] = sim.signal.ell;
            out["mean"] = sim.signal.mean;
            out["noise_var"] = sim.noise_var;
            return out;
        },
        py::arg("p") = 300, py::arg("gamma") = 0.8,
        py::arg("ell") = std::vector<double>{10, 9, 8, 7, 6, 5, 4, 3, 2, 1}, py::arg("delta") = 1.0,
        py::arg("sampling") = "uniform", py::arg("sigma") = 1.0, py::arg("kappa") = 1.0,
        py::arg("sparsity") = py::none(), py::arg("random_mean") = false, py::arg("seed") = 1,
        "Simulated missing-data problem; colored noise when kappa > 1.");

    m.def(
        "nnrls",
        [](const Matrix& y, const Matrix& mask, double w, Index max_iters, double tol,
           std::optional<Vector> column_weights) {
            NnrlsConfig cfg;
            cfg.w = w;
            cfg.max_iters = max_iters;
            cfg.tol = tol;
            cfg.column_weights = std::move(column_weights);
            NnrlsResult r = nnrls(y, mask, cfg);
            return py::make_tuple(r.x, r.iterations, r.converged);
        },
        py::arg("y"), py::arg("mask"), py::arg("w"), py::arg("max_iters") = 500, py::arg("tol") = 1e-7,
        py::arg("column_weights") = py::none(), "Returns (x, iterations, converged).");
    m.def("nnrls_weight_white", &nnrls_weight_white, py::arg("sigma"), py::arg("p"), py::arg("n"),
          py::arg("n_obs"));
    m.def("rmse", &rmse, py::arg("x_hat"), py::arg("x"));

    m.def(
        "run_benchmark",
        [](const std::string& config_text, unsigned jobs, bool timing) {
            std::istringstream in(config_text);
            const BenchmarkConfig cfg = parse_benchmark_config(in);
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_benchmark(cfg, RunOptions{jobs, timing});
            }
            py::list out;
            for (const auto& r : rows) out.append(row_dict(r));
            return out;
        },
        py::arg("config_text"), py::arg("jobs") = 1, py::arg("timing") = true,
        "Runs a benchmark config given as text; returns one dict per result row.");
}
