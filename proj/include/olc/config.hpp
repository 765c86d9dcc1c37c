/*
 Copyright 2026 The OLC Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

// JSON experiment configuration. Unknown keys are rejected at every level.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "olc/errors.hpp"
#include "olc/linalg.hpp"
#include "olc/system.hpp"

namespace olc {

struct CostGenConfig {
    double q_scale = 1.0;
    double q_ridge = 0.1;
    double c_max = 5.0;
    // Mean of the target distribution; zero when absent.
    std::optional<Vector> c_center;
};

struct OlcConfig {
    std::optional<double> eta_override;
};

struct DacConfig {
    std::size_t H_mem = 10;
    std::optional<double> eta_g;  // default 1/sqrt(T)
    std::optional<double> radius; // default kappa^3 ||B||
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    long T = 1000;
    int n_runs = 20;
    Matrix A;
    Matrix B;
    BoxSet u_box;
    BoxSet w_box;
    CostGenConfig cost_gen;
    OlcConfig olc;
    DacConfig dac;
    bool disturbances_on = true;
    std::string output_dir = "out";
    std::optional<Vector> x1;

    std::size_t state_dim() const noexcept { return A.rows(); }
    std::size_t input_dim() const noexcept { return B.cols(); }
    Vector initial_state() const { return x1 ? *x1 : Vector(state_dim()); }
    Vector target_center() const { return cost_gen.c_center ? *cost_gen.c_center : Vector(state_dim()); }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

inline double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

inline Vector as_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, where));
    return Vector(std::move(out));
}

inline Matrix as_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a non-empty array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    std::vector<double> data;
    for (const auto& row : v) {
        const Vector r = as_vector(row, where);
        if (cols == 0) cols = r.dim();
        if (r.dim() != cols || cols == 0) throw ConfigError(where + " rows must have equal, non-zero length");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows, cols, std::move(data));
}

inline BoxSet as_box(const json& v, const std::string& where) {
    reject_unknown(v, {"lower", "upper"}, where);
    if (!v.contains("lower") || !v.contains("upper")) throw ConfigError(where + " needs 'lower' and 'upper'");
    try {
        return BoxSet(as_vector(v["lower"], where + ".lower"), as_vector(v["upper"], where + ".upper"));
    } catch (const InvalidInput& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

template <class T>
T as_count(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<T>();
}

} // namespace detail

/// Checks invariants that do not need the parsed JSON: dimensions, ranges and
/// stability of A. Throws ConfigError.
inline void validate(const ExperimentConfig& cfg) {
    if (cfg.T < 2) throw ConfigError("T must be at least 2");
    if (cfg.n_runs < 1) throw ConfigError("n_runs must be at least 1");
    if (!cfg.A.is_square() || cfg.A.rows() == 0) throw ConfigError("system.A must be square");
    if (cfg.B.rows() != cfg.A.rows()) throw ConfigError("system.B must have as many rows as A");
    if (cfg.u_box.dim() != cfg.input_dim()) throw ConfigError("u_box dimension must equal the number of inputs");
    if (cfg.w_box.dim() != cfg.state_dim()) throw ConfigError("w_box dimension must equal the state dimension");
    if (!(cfg.cost_gen.q_scale > 0.0)) throw ConfigError("cost_gen.q_scale must be positive");
    if (cfg.cost_gen.q_ridge < 0.0) throw ConfigError("cost_gen.q_ridge must be non-negative");
    if (cfg.cost_gen.c_max < 0.0) throw ConfigError("cost_gen.c_max must be non-negative");
    if (cfg.cost_gen.c_center && cfg.cost_gen.c_center->dim() != cfg.state_dim())
        throw ConfigError("cost_gen.c_center dimension must equal the state dimension");
    if (cfg.x1 && cfg.x1->dim() != cfg.state_dim()) throw ConfigError("x1 dimension must equal the state dimension");
    if (cfg.dac.H_mem < 1) throw ConfigError("dac.H_mem must be at least 1");
    if (cfg.dac.eta_g && !(*cfg.dac.eta_g > 0.0)) throw ConfigError("dac.eta_g must be positive");
    if (cfg.dac.radius && *cfg.dac.radius < 0.0) throw ConfigError("dac.radius must be non-negative");
    if (cfg.olc.eta_override && !(*cfg.olc.eta_override > 0.0)) throw ConfigError("olc.eta_override must be positive");
    try {
        LtiSystem sys(cfg.A, cfg.B);
    } catch (const NotStronglyStable& e) {
        throw ConfigError(std::string("system.A: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::as_number;
    detail::reject_unknown(j, {"seed", "T", "n_runs", "system", "u_box", "w_box", "cost_gen", "olc", "dac",
                               "disturbances_on", "output_dir", "x1"},
                           "config");
    ExperimentConfig cfg;
    if (j.contains("seed")) cfg.seed = detail::as_count<std::uint64_t>(j["seed"], "seed");
    if (j.contains("T")) cfg.T = detail::as_count<long>(j["T"], "T");
    if (j.contains("n_runs")) cfg.n_runs = detail::as_count<int>(j["n_runs"], "n_runs");

    if (!j.contains("system")) throw ConfigError("missing required key 'system'");
    detail::reject_unknown(j["system"], {"A", "B"}, "system");
    if (!j["system"].contains("A") || !j["system"].contains("B")) throw ConfigError("system needs 'A' and 'B'");
    cfg.A = detail::as_matrix(j["system"]["A"], "system.A");
    cfg.B = detail::as_matrix(j["system"]["B"], "system.B");

    if (!j.contains("u_box")) throw ConfigError("missing required key 'u_box'");
    cfg.u_box = detail::as_box(j["u_box"], "u_box");
    if (!j.contains("w_box")) throw ConfigError("missing required key 'w_box'");
    cfg.w_box = detail::as_box(j["w_box"], "w_box");

    if (j.contains("cost_gen")) {
        const auto& c = j["cost_gen"];
        detail::reject_unknown(c, {"q_scale", "q_ridge", "c_max", "c_center"}, "cost_gen");
        if (c.contains("q_scale")) cfg.cost_gen.q_scale = as_number(c["q_scale"], "cost_gen.q_scale");
        if (c.contains("q_ridge")) cfg.cost_gen.q_ridge = as_number(c["q_ridge"], "cost_gen.q_ridge");
        if (c.contains("c_max")) cfg.cost_gen.c_max = as_number(c["c_max"], "cost_gen.c_max");
        if (c.contains("c_center") && !c["c_center"].is_null())
            cfg.cost_gen.c_center = detail::as_vector(c["c_center"], "cost_gen.c_center");
    }
    if (j.contains("olc")) {
        const auto& o = j["olc"];
        detail::reject_unknown(o, {"eta_override"}, "olc");
        if (o.contains("eta_override") && !o["eta_override"].is_null())
            cfg.olc.eta_override = as_number(o["eta_override"], "olc.eta_override");
    }
    if (j.contains("dac")) {
        const auto& d = j["dac"];
        detail::reject_unknown(d, {"H_mem", "eta_g", "radius"}, "dac");
        if (d.contains("H_mem")) {
            const long h = detail::as_count<long>(d["H_mem"], "dac.H_mem");
            if (h < 1) throw ConfigError("dac.H_mem must be at least 1");
            cfg.dac.H_mem = static_cast<std::size_t>(h);
        }
        if (d.contains("eta_g") && !d["eta_g"].is_null()) cfg.dac.eta_g = as_number(d["eta_g"], "dac.eta_g");
        if (d.contains("radius") && !d["radius"].is_null()) cfg.dac.radius = as_number(d["radius"], "dac.radius");
    }
    if (j.contains("disturbances_on")) {
        if (!j["disturbances_on"].is_boolean()) throw ConfigError("disturbances_on must be a boolean");
        cfg.disturbances_on = j["disturbances_on"].get<bool>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("x1") && !j["x1"].is_null()) cfg.x1 = detail::as_vector(j["x1"], "x1");
    validate(cfg);
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace detail {

inline json vector_json(const Vector& v) { return json(v.raw()); }

inline json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

} // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    using detail::json;
    json j;
    j["seed"] = cfg.seed;
    j["T"] = cfg.T;
    j["n_runs"] = cfg.n_runs;
    j["system"] = {{"A", detail::matrix_json(cfg.A)}, {"B", detail::matrix_json(cfg.B)}};
    j["u_box"] = {{"lower", detail::vector_json(cfg.u_box.lower())}, {"upper", detail::vector_json(cfg.u_box.upper())}};
    j["w_box"] = {{"lower", detail::vector_json(cfg.w_box.lower())}, {"upper", detail::vector_json(cfg.w_box.upper())}};
    j["cost_gen"] = {{"q_scale", cfg.cost_gen.q_scale}, {"q_ridge", cfg.cost_gen.q_ridge}, {"c_max", cfg.cost_gen.c_max}};
    if (cfg.cost_gen.c_center) j["cost_gen"]["c_center"] = detail::vector_json(*cfg.cost_gen.c_center);
    j["olc"] = json::object();
    if (cfg.olc.eta_override) j["olc"]["eta_override"] = *cfg.olc.eta_override;
    j["dac"] = {{"H_mem", cfg.dac.H_mem}};
    if (cfg.dac.eta_g) j["dac"]["eta_g"] = *cfg.dac.eta_g;
    if (cfg.dac.radius) j["dac"]["radius"] = *cfg.dac.radius;
    j["disturbances_on"] = cfg.disturbances_on;
    j["output_dir"] = cfg.output_dir;
    if (cfg.x1) j["x1"] = detail::vector_json(*cfg.x1);
    return j;
}

} // namespace olc
