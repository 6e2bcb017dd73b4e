#pragma once

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavssh/cavssh.hpp"

namespace cli {

using json = nlohmann::json;

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KerrScanBlock {
    std::vector<double> r_values{0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
    int n_max = cavssh::kKerrFitMax;
};

struct VertexBlock {
    std::vector<std::string> methods{"direct", "stationary"};
    double prefactor = 1.0;
};

struct BiphotonBlock {
    double omega0 = 1.0;
    double sigma = 0.1;
    std::string vertex = "gaussian";  // gaussian (stationary kernel in q*) | direct
    bool dump_state = true;
};

struct SchmidtScanBlock {
    std::vector<double> zeta_values{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0};
    double omega0 = 1.0;
    double sigma = 0.1;
};

struct DressedBandsBlock {
    bool on_shell = false;
};

struct SelfEnergyBlock {
    int n = 0;
};

struct RunConfig {
    json echo;
    cavssh::SshParams model;
    cavssh::CavityParams cavity;
    bool omega_c_pinned = false;  // "gap": ω_c = 2|t1 − t2|
    cavssh::InteractionKernel kernel;
    cavssh::ThermalState thermal;
    std::size_t n_k = cavssh::kDefaultBzPoints;
    std::size_t n_k2d = cavssh::kDefaultVertexPoints;
    std::optional<cavssh::FrequencyGrid> omega;
    std::optional<cavssh::FrequencyGrid> q;
    cavssh::FrequencyGrid k{-std::numbers::pi, std::numbers::pi, 201};
    KerrScanBlock kerr_scan;
    VertexBlock vertex;
    BiphotonBlock biphoton;
    SchmidtScanBlock schmidt_scan;
    DressedBandsBlock dressed_bands;
    SelfEnergyBlock self_energy;

    [[nodiscard]] const cavssh::FrequencyGrid& omega_grid() const {
        if (!omega) throw ConfigInvalid("grids.omega is required for this command");
        return *omega;
    }
    [[nodiscard]] const cavssh::FrequencyGrid& q_grid() const {
        if (!q) throw ConfigInvalid("grids.q is required for this command");
        return *q;
    }
};

namespace detail {

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigInvalid(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigInvalid("unknown key '" + key + "' in " + where);
    }
}

inline double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigInvalid(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigInvalid(where + "." + key + " must be finite");
    return x;
}

inline std::size_t count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigInvalid(where + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

inline bool flag(const json& obj, const char* key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigInvalid(where + "." + key + " must be a boolean");
    return obj.at(key).get<bool>();
}

inline std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ConfigInvalid(where + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
}

inline std::vector<double> numbers(const json& obj, const char* key, std::vector<double> fallback,
                                   const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) throw ConfigInvalid(where + "." + key + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
            throw ConfigInvalid(where + "." + key + " must hold finite numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

inline cavssh::FrequencyGrid grid(const json& obj, const std::string& where) {
    only_keys(obj, where, {"start", "stop", "count"});
    if (!obj.contains("start") || !obj.contains("stop") || !obj.contains("count")) {
        throw ConfigInvalid(where + " needs start, stop and count");
    }
    return {number(obj, "start", 0.0, where), number(obj, "stop", 0.0, where), count(obj, "count", 0, where)};
}

}  // namespace detail

/// Parses and validates a run configuration. Every failure is a ConfigInvalid.
inline RunConfig parse_config(const json& root) {
    using namespace detail;
    RunConfig cfg;
    cfg.echo = root;
    only_keys(root, "config",
              {"model", "cavity", "kernel", "thermal", "grids", "kerr_scan", "vertex", "biphoton", "schmidt_scan",
               "dressed_bands", "self_energy"});

    const json empty = json::object();
    auto section = [&](const char* key) -> const json& { return root.contains(key) ? root.at(key) : empty; };

    const json& model = section("model");
    only_keys(model, "model", {"t1", "t2"});
    cfg.model = {number(model, "t1", 1.0, "model"), number(model, "t2", 0.5, "model")};

    const json& cavity = section("cavity");
    only_keys(cavity, "cavity", {"omega_c", "mass_beta", "g", "eta"});
    cfg.cavity.mass_beta = number(cavity, "mass_beta", 0.5, "cavity");
    cfg.cavity.g = number(cavity, "g", 0.05, "cavity");
    cfg.cavity.eta = number(cavity, "eta", 0.01, "cavity");
    if (!cavity.contains("omega_c") || (cavity.at("omega_c").is_string() && cavity.at("omega_c") == "gap")) {
        cfg.omega_c_pinned = true;
    } else if (cavity.at("omega_c").is_number()) {
        cfg.cavity.omega_c = number(cavity, "omega_c", 1.0, "cavity");
    } else {
        throw ConfigInvalid("cavity.omega_c must be a number or \"gap\"");
    }

    const json& kernel = section("kernel");
    only_keys(kernel, "kernel", {"V0", "zeta"});
    cfg.kernel = {number(kernel, "V0", 1.0, "kernel"), number(kernel, "zeta", 0.0, "kernel")};

    const json& thermal = section("thermal");
    only_keys(thermal, "thermal", {"temperature"});
    cfg.thermal = {number(thermal, "temperature", 0.0, "thermal")};

    const json& grids = section("grids");
    only_keys(grids, "grids", {"n_k", "n_k2d", "omega", "q", "k"});
    cfg.n_k = count(grids, "n_k", cfg.n_k, "grids");
    cfg.n_k2d = count(grids, "n_k2d", cfg.n_k2d, "grids");
    if (grids.contains("omega")) cfg.omega = grid(grids.at("omega"), "grids.omega");
    if (grids.contains("q")) cfg.q = grid(grids.at("q"), "grids.q");
    if (grids.contains("k")) cfg.k = grid(grids.at("k"), "grids.k");

    const json& ks = section("kerr_scan");
    only_keys(ks, "kerr_scan", {"r_values", "n_max"});
    cfg.kerr_scan.r_values = numbers(ks, "r_values", cfg.kerr_scan.r_values, "kerr_scan");
    cfg.kerr_scan.n_max = static_cast<int>(count(ks, "n_max", static_cast<std::size_t>(cfg.kerr_scan.n_max), "kerr_scan"));

    const json& vx = section("vertex");
    only_keys(vx, "vertex", {"methods", "prefactor"});
    if (vx.contains("methods")) {
        cfg.vertex.methods.clear();
        if (!vx.at("methods").is_array() || vx.at("methods").empty()) {
            throw ConfigInvalid("vertex.methods must be a non-empty array");
        }
        for (const auto& m : vx.at("methods")) {
            if (!m.is_string() || (m != "direct" && m != "stationary")) {
                throw ConfigInvalid("vertex.methods entries must be \"direct\" or \"stationary\"");
            }
            cfg.vertex.methods.push_back(m.get<std::string>());
        }
    }
    cfg.vertex.prefactor = number(vx, "prefactor", 1.0, "vertex");

    const json& bp = section("biphoton");
    only_keys(bp, "biphoton", {"omega0", "sigma", "vertex", "dump_state"});
    cfg.biphoton.omega0 = number(bp, "omega0", cfg.biphoton.omega0, "biphoton");
    cfg.biphoton.sigma = number(bp, "sigma", cfg.biphoton.sigma, "biphoton");
    cfg.biphoton.vertex = text(bp, "vertex", cfg.biphoton.vertex, "biphoton");
    cfg.biphoton.dump_state = flag(bp, "dump_state", cfg.biphoton.dump_state, "biphoton");
    if (cfg.biphoton.vertex != "gaussian" && cfg.biphoton.vertex != "direct") {
        throw ConfigInvalid("biphoton.vertex must be \"gaussian\" or \"direct\"");
    }

    const json& ss = section("schmidt_scan");
    only_keys(ss, "schmidt_scan", {"zeta_values", "omega0", "sigma"});
    cfg.schmidt_scan.zeta_values = numbers(ss, "zeta_values", cfg.schmidt_scan.zeta_values, "schmidt_scan");
    cfg.schmidt_scan.omega0 = number(ss, "omega0", cfg.schmidt_scan.omega0, "schmidt_scan");
    cfg.schmidt_scan.sigma = number(ss, "sigma", cfg.schmidt_scan.sigma, "schmidt_scan");

    const json& db = section("dressed_bands");
    only_keys(db, "dressed_bands", {"on_shell"});
    cfg.dressed_bands.on_shell = flag(db, "on_shell", false, "dressed_bands");

    const json& se = section("self_energy");
    only_keys(se, "self_energy", {"n"});
    cfg.self_energy.n = static_cast<int>(count(se, "n", 0, "self_energy"));

    // Domain invariants, all surfaced as configuration errors.
    try {
        cfg.model.validate();
        if (cfg.omega_c_pinned) cfg.cavity.omega_c = cavssh::resonant_cavity_frequency(cfg.model);
        cfg.cavity.validate();
        cfg.kernel.validate();
        cfg.thermal.validate();
        cavssh::require_bz_points(cfg.n_k);
        cavssh::require_bz_points(cfg.n_k2d);
        if (cfg.omega) cfg.omega->validate();
        if (cfg.q) cfg.q->validate();
        cfg.k.validate();
    } catch (const cavssh::Error& e) {
        throw ConfigInvalid(e.what());
    }
    if (cfg.k.start < -std::numbers::pi || cfg.k.stop > std::numbers::pi) {
        throw ConfigInvalid("grids.k must lie inside [-pi, pi]");
    }
    for (double r : cfg.kerr_scan.r_values) {
        if (!(r >= 0.0)) throw ConfigInvalid("kerr_scan.r_values must be >= 0");
        if (std::abs(r - 1.0) < cavssh::kKerrCriticalGuard) {
            throw ConfigInvalid("kerr_scan.r_values must keep |r - 1| >= 0.02");
        }
    }
    if (cfg.kerr_scan.n_max < 3) throw ConfigInvalid("kerr_scan.n_max must be >= 3");
    for (std::size_t i = 0; i < cfg.schmidt_scan.zeta_values.size(); ++i) {
        const double z = cfg.schmidt_scan.zeta_values[i];
        if (!(z >= 0.0)) throw ConfigInvalid("schmidt_scan.zeta_values must be >= 0");
        if (i > 0 && z < cfg.schmidt_scan.zeta_values[i - 1]) throw ConfigInvalid("schmidt_scan.zeta_values must be sorted");
    }
    if (!(cfg.biphoton.sigma > 0.0) || !(cfg.schmidt_scan.sigma > 0.0)) throw ConfigInvalid("sigma must be > 0");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigInvalid("cannot read config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    json root;
    try {
        root = json::parse(buffer.str(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(root);
}

}  // namespace cli
