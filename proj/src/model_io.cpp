#include "eblp/model_io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eblp/errors.hpp"

namespace eblp {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "eblp-model";
constexpr int kVersion = 1;

json to_json_vector(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from(const json& j, const char* key, Index expected) {
    const auto values = j.at(key).get<std::vector<double>>();
    if (expected >= 0 && static_cast<Index>(values.size()) != expected) {
        throw ParseError(std::string("model field '") + key + "' has length " +
                         std::to_string(values.size()) + ", expected " + std::to_string(expected));
    }
    Vector out(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<Index>(i)] = values[i];
    return out;
}

}  // namespace

void save_model(std::ostream& out, const EblpModel& model) {
    if (!model.fitted) throw StateError("cannot save an unfitted model");
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["p"] = model.p();
    j["rank"] = model.rank;
    j["whitened"] = model.whitened;
    j["noise_variance"] = model.noise_variance;
    j["m_hat"] = to_json_vector(model.m_hat);
    j["w"] = to_json_vector(model.w);
    j["mean"] = to_json_vector(model.mean);
    j["noise_shape"] = to_json_vector(model.noise_shape);
    j["oos_coefficients"] = to_json_vector(model.oos_coefficients);
    json pcs = json::array();
    for (Index k = 0; k < model.u_hat.cols(); ++k) pcs.push_back(to_json_vector(model.u_hat.col(k)));
    j["pcs"] = std::move(pcs);
    json est = json::array();
    for (const auto& e : model.estimates) {
        est.push_back({{"ell_hat", e.ell_hat},
                       {"c2_hat", e.c2_hat},
                       {"ct2_hat", e.ct2_hat},
                       {"lambda_star", e.lambda_star},
                       {"sigma_obs", e.sigma_obs},
                       {"supercritical", e.supercritical},
                       {"clamped", e.clamped}});
    }
    j["estimates"] = std::move(est);
    out << j.dump(1) << '\n';
}

void save_model_file(const std::filesystem::path& path, const EblpModel& model) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    save_model(out, model);
    if (!out) throw Error("write failed: " + path.string());
}

EblpModel load_model(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormat) throw ParseError("not an eblp model file");
        if (j.at("version").get<int>() != kVersion) {
            throw ParseError("unsupported model version " + j.at("version").dump());
        }
        EblpModel model;
        const Index p = j.at("p").get<Index>();
        model.rank = j.at("rank").get<Index>();
        if (p <= 0 || model.rank < 0) throw ParseError("model has invalid dimensions");
        model.whitened = j.at("whitened").get<bool>();
        model.noise_variance = j.at("noise_variance").get<double>();
        model.m_hat = vector_from(j, "m_hat", p);
        model.w = vector_from(j, "w", p);
        model.mean = vector_from(j, "mean", p);
        model.noise_shape = vector_from(j, "noise_shape", p);
        model.oos_coefficients = vector_from(j, "oos_coefficients", model.rank);
        const json& pcs = j.at("pcs");
        if (!pcs.is_array() || static_cast<Index>(pcs.size()) != model.rank) {
            throw ParseError("model pcs do not match rank");
        }
        model.u_hat.resize(p, model.rank);
        for (Index k = 0; k < model.rank; ++k) {
            const auto col = pcs[static_cast<std::size_t>(k)].get<std::vector<double>>();
            if (static_cast<Index>(col.size()) != p) throw ParseError("model pc has wrong length");
            for (Index i = 0; i < p; ++i) model.u_hat(i, k) = col[static_cast<std::size_t>(i)];
        }
        const json& est = j.at("estimates");
        if (!est.is_array() || static_cast<Index>(est.size()) != model.rank) {
            throw ParseError("model estimates do not match rank");
        }
        for (const auto& e : est) {
            SpikeEstimate s;
            s.ell_hat = e.at("ell_hat").get<double>();
            s.c2_hat = e.at("c2_hat").get<double>();
            s.ct2_hat = e.at("ct2_hat").get<double>();
            s.lambda_star = e.at("lambda_star").get<double>();
            s.sigma_obs = e.at("sigma_obs").get<double>();
            s.supercritical = e.at("supercritical").get<bool>();
            s.clamped = e.at("clamped").get<bool>();
            model.estimates.push_back(s);
        }
        if (!model.u_hat.allFinite() || !model.m_hat.allFinite() || !model.w.allFinite() ||
            !model.mean.allFinite() || !model.oos_coefficients.allFinite()) {
            throw ParseError("model contains non-finite values");
        }
        model.fitted = true;
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

EblpModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return load_model(in);
}

}  // namespace eblp
