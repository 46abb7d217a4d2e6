#pragma once
// Run configuration: a flat key = value document plus the structures the
// rest of the engine consumes. Unknown keys are hard errors so a typo can
// never silently fall back to a default.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <snsrate/channel_model.hpp>
#include <snsrate/key_rate.hpp>

namespace snsrate {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

// failure budgets consumed by one pipeline evaluation
struct Budgets {
    double xi_chain = 1e-20;  // every expected/observed count conversion
    double xi_c = 1e-20;      // pair-survival deficiency thresholds
    double xi_h = 1e-20;      // pair-set split (without replacement)
    double eps_2 = 1e-20;     // pairing exchange slack
    double eps_5 = 1e-20;     // odd-error quantile
    double definetti_r = 0.0; // 0 = automatic square-root trim
};

struct OptimizerSettings {
    bool enabled = true;
    int restarts = 3;
    int max_passes = 60;
    double rel_tol = 1e-4;
    double init_step = 0.2;
};

struct RunConfig {
    // reference bench; distance_km is overridden per grid point
    DeviceParams device{.distance_km = 0.0,
                        .dark_count_prob = 1e-8,
                        .misalignment = 0.03,
                        .detector_eff = 0.30,
                        .fiber_loss_db_km = 0.2};
    double distance_start_km = 0.0;
    double distance_stop_km = 500.0;
    double distance_step_km = 10.0;

    double n_total = 1e12;
    double mu_1 = 0.1, mu_2 = 0.5, mu_z = 0.48;
    double eps_send = 0.10, p_z = 0.70;
    double p_1 = 0.25, p_2 = 0.15;
    double lambda_slice = 0.12;

    Budgets budgets;
    RateParams rate_params;
    TwccMode mode = TwccMode::strict;

    std::vector<Pipeline> pipelines{Pipeline::plain_sns, Pipeline::standard_twcc,
                                    Pipeline::oper, Pipeline::aopp};
    OptimizerSettings optimizer;
    std::uint64_t seed = 1;
    OutputFormat format = OutputFormat::csv;
    std::string out_path = "-";
};

inline ProtocolParams symmetric_protocol(const RunConfig& cfg) {
    ProtocolParams p;
    p.mu_az = p.mu_bz = cfg.mu_z;
    p.eps_a = p.eps_b = cfg.eps_send;
    p.p_z = cfg.p_z;
    p.mu_a1 = p.mu_b1 = cfg.mu_1;
    p.mu_a2 = p.mu_b2 = cfg.mu_2;
    p.p_a1 = p.p_b1 = cfg.p_1;
    p.p_a2 = p.p_b2 = cfg.p_2;
    p.lambda_slice = cfg.lambda_slice;
    p.n_total = cfg.n_total;
    return p;
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return u;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

} // namespace detail

inline std::vector<Pipeline> parse_pipelines(const std::string& csv) {
    std::vector<Pipeline> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = detail::trim(tok);
        if (tok.empty()) continue;
        Pipeline p;
        if (tok == "plain") p = Pipeline::plain_sns;
        else if (tok == "twcc") p = Pipeline::standard_twcc;
        else if (tok == "oper") p = Pipeline::oper;
        else if (tok == "aopp") p = Pipeline::aopp;
        else throw ConfigError("config: unknown pipeline '" + tok + "'");
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

inline void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_u64;

    if (key == "distance_start_km") cfg.distance_start_km = parse_double(key, value);
    else if (key == "distance_stop_km") cfg.distance_stop_km = parse_double(key, value);
    else if (key == "distance_step_km") cfg.distance_step_km = parse_double(key, value);
    else if (key == "dark_count_prob") cfg.device.dark_count_prob = parse_double(key, value);
    else if (key == "misalignment") cfg.device.misalignment = parse_double(key, value);
    else if (key == "detector_eff") cfg.device.detector_eff = parse_double(key, value);
    else if (key == "fiber_loss_db_km") cfg.device.fiber_loss_db_km = parse_double(key, value);
    else if (key == "n_total") cfg.n_total = parse_double(key, value);
    else if (key == "mu_1") cfg.mu_1 = parse_double(key, value);
    else if (key == "mu_2") cfg.mu_2 = parse_double(key, value);
    else if (key == "mu_z") cfg.mu_z = parse_double(key, value);
    else if (key == "eps_send") cfg.eps_send = parse_double(key, value);
    else if (key == "p_z") cfg.p_z = parse_double(key, value);
    else if (key == "p_1") cfg.p_1 = parse_double(key, value);
    else if (key == "p_2") cfg.p_2 = parse_double(key, value);
    else if (key == "lambda_slice") cfg.lambda_slice = parse_double(key, value);
    else if (key == "xi_chain") cfg.budgets.xi_chain = parse_double(key, value);
    else if (key == "xi_c") cfg.budgets.xi_c = parse_double(key, value);
    else if (key == "xi_h") cfg.budgets.xi_h = parse_double(key, value);
    else if (key == "eps_2") cfg.budgets.eps_2 = parse_double(key, value);
    else if (key == "eps_5") cfg.budgets.eps_5 = parse_double(key, value);
    else if (key == "definetti_r") cfg.budgets.definetti_r = parse_double(key, value);
    else if (key == "eps_hat") cfg.rate_params.eps_hat = parse_double(key, value);
    else if (key == "eps_pa") cfg.rate_params.eps_pa = parse_double(key, value);
    else if (key == "eps_cor") cfg.rate_params.eps_cor = parse_double(key, value);
    else if (key == "f_ec") cfg.rate_params.f_ec = parse_double(key, value);
    else if (key == "twcc_mode") {
        if (value == "strict") cfg.mode = TwccMode::strict;
        else if (value == "paired") cfg.mode = TwccMode::paired;
        else throw ConfigError("config: twcc_mode must be strict or paired, got '" + value + "'");
    } else if (key == "pipelines") cfg.pipelines = parse_pipelines(value);
    else if (key == "optimize") cfg.optimizer.enabled = parse_bool(key, value);
    else if (key == "optimizer_restarts")
        cfg.optimizer.restarts = static_cast<int>(parse_u64(key, value));
    else if (key == "optimizer_max_passes")
        cfg.optimizer.max_passes = static_cast<int>(parse_u64(key, value));
    else if (key == "optimizer_rel_tol") cfg.optimizer.rel_tol = parse_double(key, value);
    else if (key == "optimizer_init_step") cfg.optimizer.init_step = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "format") {
        if (value == "csv") cfg.format = OutputFormat::csv;
        else if (value == "json") cfg.format = OutputFormat::json;
        else throw ConfigError("config: format must be csv or json, got '" + value + "'");
    } else if (key == "out") cfg.out_path = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

inline void validate(const RunConfig& cfg) {
    if (!(cfg.distance_step_km > 0.0))
        throw ConfigError("config: distance_step_km must be positive");
    if (cfg.distance_stop_km < cfg.distance_start_km)
        throw ConfigError("config: empty distance grid");
    if (!(cfg.n_total >= 1.0)) throw ConfigError("config: n_total must be at least 1");
    auto in_unit = [](const char* name, double v) {
        if (!(v > 0.0) || !(v < 1.0))
            throw ConfigError(std::string("config: ") + name + " must lie in (0,1)");
    };
    in_unit("xi_chain", cfg.budgets.xi_chain);
    in_unit("xi_c", cfg.budgets.xi_c);
    in_unit("xi_h", cfg.budgets.xi_h);
    in_unit("eps_2", cfg.budgets.eps_2);
    in_unit("eps_5", cfg.budgets.eps_5);
    in_unit("eps_hat", cfg.rate_params.eps_hat);
    in_unit("eps_pa", cfg.rate_params.eps_pa);
    in_unit("eps_cor", cfg.rate_params.eps_cor);
    if (cfg.budgets.definetti_r < 0.0) throw ConfigError("config: definetti_r must be >= 0");
    if (cfg.optimizer.restarts < 1 || cfg.optimizer.restarts > 16)
        throw ConfigError("config: optimizer_restarts must lie in [1, 16]");
    if (cfg.optimizer.max_passes < 1) throw ConfigError("config: optimizer_max_passes must be >= 1");
    if (!(cfg.optimizer.rel_tol > 0.0)) throw ConfigError("config: optimizer_rel_tol must be > 0");
    if (!(cfg.optimizer.init_step > 0.0) || cfg.optimizer.init_step >= 1.0)
        throw ConfigError("config: optimizer_init_step must lie in (0,1)");
    try {
        validate(cfg.device);
        validate(symmetric_protocol(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
        apply_config_line(cfg, key, value);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace snsrate
