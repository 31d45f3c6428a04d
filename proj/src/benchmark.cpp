#include "eblp/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "eblp/baselines.hpp"
#include "eblp/errors.hpp"
#include "eblp/matrix_io.hpp"
#include "eblp/pipeline.hpp"

namespace eblp {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename Int>
Int parse_integer(const std::string& value) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        throw ParseError("not an integer: '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& value) {
    const std::string v = lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ParseError("not a boolean: '" + value + "'");
}

std::vector<double> parse_doubles(const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(item));
    if (out.empty()) throw ParseError("empty list");
    return out;
}

using Setter = std::function<void(BenchmarkExperiment&, const std::string&)>;

const std::map<std::string, Setter>& experiment_keys() {
    static const std::map<std::string, Setter> keys = {
        {"p", [](auto& e, const auto& v) { e.config.p = parse_integer<Index>(v); }},
        {"gamma", [](auto& e, const auto& v) { e.config.gamma = parse_double(v); }},
        {"ell", [](auto& e, const auto& v) { e.config.ell = parse_doubles(v); }},
        {"rank", [](auto& e, const auto& v) { e.rank = parse_integer<Index>(v); }},
        {"sparsity",
         [](auto& e, const auto& v) {
             if (lower(v) == "dense") {
                 e.config.sparsity.reset();
             } else {
                 e.config.sparsity = parse_integer<Index>(v);
             }
         }},
        {"sampling",
         [](auto& e, const auto& v) {
             const std::string s = lower(v);
             if (s == "uniform") {
                 e.config.sampling = Sampling::Uniform;
             } else if (s == "linear") {
                 e.config.sampling = Sampling::Linear;
             } else {
                 throw ParseError("sampling must be uniform or linear, got '" + v + "'");
             }
         }},
        {"delta", [](auto& e, const auto& v) { e.config.delta = parse_double(v); }},
        {"noise",
         [](auto& e, const auto& v) {
             const std::string s = lower(v);
             if (s == "white") {
                 e.config.noise = NoiseKind::White;
             } else if (s == "colored") {
                 e.config.noise = NoiseKind::Colored;
             } else {
                 throw ParseError("noise must be white or colored, got '" + v + "'");
             }
         }},
        {"kappa", [](auto& e, const auto& v) { e.config.kappa = parse_double(v); }},
        {"sigma", [](auto& e, const auto& v) { e.sigmas = parse_doubles(v); }},
        {"replicates", [](auto& e, const auto& v) { e.config.replicates = parse_integer<Index>(v); }},
        {"random_mean", [](auto& e, const auto& v) { e.config.random_mean = parse_bool(v); }},
        {"methods",
         [](auto& e, const auto& v) {
             e.methods.clear();
             for (const auto& m : split_list(v)) e.methods.push_back(parse_method(m));
             if (e.methods.empty()) throw ParseError("methods list is empty");
         }},
        {"noise_profile",
         [](auto& e, const auto& v) {
             const std::string s = lower(v);
             if (s == "known") {
                 e.known_noise_profile = true;
             } else if (s == "white") {
                 e.known_noise_profile = false;
             } else {
                 throw ParseError("noise_profile must be known or white, got '" + v + "'");
             }
         }},
        {"nnrls_max_iters", [](auto& e, const auto& v) { e.nnrls_max_iters = parse_integer<Index>(v); }},
        {"nnrls_tol", [](auto& e, const auto& v) { e.nnrls_tol = parse_double(v); }},
        {"weight_replicates",
         [](auto& e, const auto& v) { e.weight_replicates = parse_integer<Index>(v); }},
        {"n_out", [](auto& e, const auto& v) { e.n_out = parse_integer<Index>(v); }},
    };
    return keys;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
}

std::optional<double> parse_optional(const std::string& s) {
    if (s == "NA") return std::nullopt;
    return parse_double(s);
}

struct Task {
    std::size_t experiment = 0;
    std::size_t sigma_index = 0;
    Index replicate = 0;
};

std::uint64_t task_seed(std::uint64_t seed, const Task& task, std::uint64_t stream) {
    return derive_seed(seed, {static_cast<std::uint64_t>(task.experiment),
                              static_cast<std::uint64_t>(task.sigma_index),
                              static_cast<std::uint64_t>(task.replicate), stream});
}

FitOptions eblp_options(const BenchmarkExperiment& exp, const ExperimentConfig& cfg, ShrinkMode mode,
                        bool whiten) {
    FitOptions opts;
    opts.rank = exp.effective_rank();
    opts.whiten = whiten;
    opts.mode = mode;
    opts.center = true;
    if (whiten && cfg.noise == NoiseKind::Colored && exp.known_noise_profile) {
        ExperimentConfig unit = cfg;
        unit.sigma = 1.0;
        opts.noise_profile = noise_variances(unit);
    }
    return opts;
}

double nnrls_weight(const BenchmarkExperiment& exp, const ExperimentConfig& cfg, const Matrix& mask,
                    const std::optional<Vector>& column_weights, Rng& rng) {
    const Index n = mask.rows();
    if (cfg.noise == NoiseKind::White && !column_weights) {
        return nnrls_weight_white(cfg.sigma, cfg.p, n, mask.sum());
    }
    const MatrixSampler noise = [&cfg, n](Rng& r) { return generate_noise(cfg, n, r); };
    const MatrixSampler masks = [&cfg, n](Rng& r) { return generate_masks(cfg, n, r); };
    return nnrls_weight_colored(noise, masks, exp.weight_replicates, rng, column_weights);
}

std::vector<ResultRow> run_task(const BenchmarkConfig& config, const Task& task, bool timing) {
    const BenchmarkExperiment& exp = config.experiments[task.experiment];
    ExperimentConfig cfg = exp.config;
    cfg.sigma = exp.sigmas[task.sigma_index];
    const Index n = cfg.n();
    const auto ids = [&](std::uint64_t stream) { return task_seed(config.seed, task, stream); };

    Rng rng(ids(0));
    const SimulatedData sim = simulate(cfg, n, rng);
    const Dataset data = to_dataset(sim);

    ResultRow base;
    base.experiment = exp.id;
    base.sigma = cfg.sigma;
    base.delta = cfg.delta;
    base.kappa = cfg.kappa;
    base.sparsity = cfg.sparsity ? std::to_string(*cfg.sparsity) : "dense";
    base.sampling = cfg.sampling == Sampling::Linear ? "linear" : "uniform";
    base.noise = cfg.noise == NoiseKind::Colored ? "colored" : "white";
    base.p = cfg.p;
    base.n = n;
    base.replicate = task.replicate;

    std::vector<ResultRow> rows;
    for (std::size_t mi = 0; mi < exp.methods.size(); ++mi) {
        const Method method = exp.methods[mi];
        ResultRow row = base;
        row.method = method_name(method);
        const auto start = std::chrono::steady_clock::now();
        switch (method) {
            case Method::Eblp:
            case Method::EblpWhite:
            case Method::Unwhitened: {
                const bool whiten = method != Method::Unwhitened;
                const ShrinkMode mode = method == Method::EblpWhite ? ShrinkMode::White : ShrinkMode::Plugin;
                const FitResult fit = fit_in_sample(data, eblp_options(exp, cfg, mode, whiten));
                row.rmse = rmse(fit.x_hat, sim.x);
                row.amse = fit.model.amse();
                break;
            }
            case Method::Nnrls: {
                Rng wrng(ids(1 + mi));
                NnrlsConfig nc;
                nc.max_iters = exp.nnrls_max_iters;
                nc.tol = exp.nnrls_tol;
                if (cfg.sampling == Sampling::Linear) {
                    nc.column_weights = column_probabilities(cfg).cwiseSqrt();
                }
                nc.w = nnrls_weight(exp, cfg, sim.mask, nc.column_weights, wrng);
                row.rmse = rmse(nnrls(sim.y, sim.mask, nc).x, sim.x);
                break;
            }
            case Method::OutOfSample: {
                const FitResult fit =
                    fit_in_sample(data, eblp_options(exp, cfg, ShrinkMode::Plugin, true));
                Rng orng(ids(1 + mi));
                const SimulatedData fresh = simulate_from(cfg, sim.signal, exp.n_out.value_or(n), orng);
                row.rmse = rmse(predict_out_of_sample(fit.model, to_dataset(fresh)), fresh.x);
                break;
            }
        }
        if (timing) {
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Eblp: return "eblp";
        case Method::EblpWhite: return "eblp_white";
        case Method::Unwhitened: return "unwhitened";
        case Method::Nnrls: return "nnrls";
        case Method::OutOfSample: return "eblp_oos";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    const std::string s = lower(trim(name));
    if (s == "eblp") return Method::Eblp;
    if (s == "eblp_white") return Method::EblpWhite;
    if (s == "unwhitened") return Method::Unwhitened;
    if (s == "nnrls") return Method::Nnrls;
    if (s == "eblp_oos" || s == "oos") return Method::OutOfSample;
    throw ParseError("unknown method '" + name + "'");
}

Index BenchmarkExperiment::effective_rank() const {
    return rank.value_or(static_cast<Index>(config.ell.size()));
}

BenchmarkConfig parse_benchmark_config(std::istream& in) {
    BenchmarkConfig out;
    std::vector<std::string> unknown;
    BenchmarkExperiment* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(where + ": unterminated section header");
            std::istringstream header(line.substr(1, line.size() - 2));
            std::string kind;
            std::string name;
            std::string extra;
            header >> kind >> name;
            if (kind != "experiment" || name.empty() || (header >> extra)) {
                throw ParseError(where + ": expected [experiment NAME]");
            }
            for (const auto& e : out.experiments) {
                if (e.id == name) throw ParseError(where + ": duplicate experiment '" + name + "'");
            }
            out.experiments.emplace_back();
            out.experiments.back().id = name;
            current = &out.experiments.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (!current) {
                if (key == "seed") {
                    out.seed = parse_integer<std::uint64_t>(value);
                } else {
                    unknown.push_back(key + " (" + where + ")");
                }
                continue;
            }
            const auto& keys = experiment_keys();
            const auto it = keys.find(key);
            if (it == keys.end()) {
                unknown.push_back(key + " (" + where + ")");
                continue;
            }
            it->second(*current, value);
        } catch (const ParseError& e) {
            throw ParseError(where + ", key '" + key + "': " + e.what());
        }
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ParseError(msg);
    }
    for (const auto& e : out.experiments) {
        try {
            e.config.validate();
        } catch (const DomainError& err) {
            throw ParseError("experiment '" + e.id + "': " + err.what());
        }
        for (double s : e.sigmas) {
            if (!(s >= 0.0)) throw ParseError("experiment '" + e.id + "': sigma must be nonnegative");
        }
        const Index rank = e.effective_rank();
        if (rank < 1 || rank >= std::min(e.config.p, e.config.n())) {
            throw ParseError("experiment '" + e.id + "': rank out of range");
        }
        if (e.nnrls_max_iters < 1 || !(e.nnrls_tol > 0.0) || e.weight_replicates < 1) {
            throw ParseError("experiment '" + e.id + "': invalid solver settings");
        }
        if (e.n_out && *e.n_out < 0) throw ParseError("experiment '" + e.id + "': n_out < 0");
    }
    return out;
}

BenchmarkConfig parse_benchmark_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_benchmark_config(in);
}

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols = {
        "experiment", "method", "sigma", "delta", "kappa",     "sparsity", "sampling",
        "noise",      "p",      "n",     "replicate", "rmse", "seconds",  "amse"};
    return cols;
}

std::vector<ResultRow> run_benchmark(const BenchmarkConfig& config, const RunOptions& opts) {
    std::vector<Task> tasks;
    for (std::size_t e = 0; e < config.experiments.size(); ++e) {
        const auto& exp = config.experiments[e];
        for (std::size_t s = 0; s < exp.sigmas.size(); ++s)
            for (Index r = 0; r < exp.config.replicates; ++r) tasks.push_back({e, s, r});
    }
    std::vector<std::vector<ResultRow>> slots(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                slots[i] = run_task(config, tasks[i], opts.timing);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(tasks.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    std::vector<ResultRow> rows;
    for (auto& slot : slots) {
        for (auto& row : slot) rows.push_back(std::move(row));
    }
    return rows;
}

SimulatedData simulate_grid_point(const BenchmarkConfig& config, std::size_t experiment,
                                  std::size_t sigma_index, Index replicate) {
    if (experiment >= config.experiments.size()) throw DomainError("no such experiment");
    const auto& exp = config.experiments[experiment];
    if (sigma_index >= exp.sigmas.size()) throw DomainError("sigma index out of range");
    if (replicate < 0) throw DomainError("replicate must be nonnegative");
    ExperimentConfig cfg = exp.config;
    cfg.sigma = exp.sigmas[sigma_index];
    Rng rng(task_seed(config.seed, {experiment, sigma_index, replicate}, 0));
    return simulate(cfg, cfg.n(), rng);
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.method << ',' << format_double(r.sigma) << ','
            << format_double(r.delta) << ',' << format_double(r.kappa) << ',' << r.sparsity << ','
            << r.sampling << ',' << r.noise << ',' << r.p << ',' << r.n << ',' << r.replicate << ','
            << format_double(r.rmse) << ',' << format_optional(r.seconds) << ','
            << format_optional(r.amse) << '\n';
    }
}

std::vector<ResultRow> read_results(std::istream& in) {
    const auto& cols = result_columns();
    std::string line;
    if (!std::getline(in, line)) throw ParseError("results table is empty");
    std::vector<std::string> header;
    {
        std::istringstream is(trim(line));
        std::string f;
        while (std::getline(is, f, ',')) header.push_back(f);
    }
    if (header != cols) throw ParseError("results header does not match the expected columns");
    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream is(line);
        std::string field;
        while (std::getline(is, field, ',')) f.push_back(field);
        if (f.size() != cols.size()) {
            throw ParseError("results line " + std::to_string(line_no) + ": wrong field count");
        }
        ResultRow r;
        r.experiment = f[0];
        r.method = f[1];
        r.sigma = parse_double(f[2]);
        r.delta = parse_double(f[3]);
        r.kappa = parse_double(f[4]);
        r.sparsity = f[5];
        r.sampling = f[6];
        r.noise = f[7];
        r.p = parse_integer<Index>(f[8]);
        r.n = parse_integer<Index>(f[9]);
        r.replicate = parse_integer<Index>(f[10]);
        r.rmse = parse_double(f[11]);
        r.seconds = parse_optional(f[12]);
        r.amse = parse_optional(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace eblp
