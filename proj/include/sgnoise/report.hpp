#pragma once

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#include "sgnoise/core.hpp"
#include "sgnoise/scenario.hpp"

namespace sgn {

// Serialization of configs and results. Numbers are printed through %.17g so
// identical runs produce byte-identical files.

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline nlohmann::json to_json(const PhysParams& p) {
    return nlohmann::json{{"mass", p.mass},   {"omega0", p.omega0}, {"hbar", p.hbar},
                          {"g_nv", p.g_nv},   {"mu_b", p.mu_b},     {"eta", p.eta},
                          {"n_periods", p.n_periods}};
}

inline PhysParams phys_params_from_json(const nlohmann::json& j) {
    PhysParams p;
    p.mass = j.value("mass", 1.0);
    p.omega0 = j.value("omega0", 1.0);
    p.hbar = j.value("hbar", 1.0);
    p.g_nv = j.value("g_nv", 1.0);
    p.mu_b = j.value("mu_b", 1.0);
    p.eta = j.value("eta", 1.0);
    p.n_periods = j.value("n_periods", 1);
    p.validate();
    return p;
}

inline nlohmann::json to_json(const Psd& psd) {
    nlohmann::json params;
    for (const auto& [k, v] : model_parameters(psd)) params[k] = v;
    return nlohmann::json{{"model", model_name(psd)}, {"parameters", params}};
}

inline Psd psd_from_json(const nlohmann::json& j) {
    if (!j.contains("model")) throw config_error("psd: missing 'model'");
    const nlohmann::json params_json =
        j.contains("parameters") ? j.at("parameters") : nlohmann::json::object();
    std::map<std::string, double> params;
    for (const auto& [k, v] : params_json.items()) params[k] = v.get<double>();
    return make_psd(j["model"].get<std::string>(), params);
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
    return nlohmann::json{{"params", to_json(c.params)},
                          {"noise_kind", to_string(c.noise_kind)},
                          {"psd", to_json(c.psd)},
                          {"n_trials", c.n_trials},
                          {"t_f", c.t_final},
                          {"dt", c.dt},
                          {"master_seed", c.master_seed},
                          {"arm_correlation", to_string(c.arm_correlation)},
                          {"phi_diff_ideal", c.phi_diff_ideal},
                          {"outputs", c.outputs},
                          {"oversample", c.synthesis.oversample},
                          {"units", "natural (m = omega0 = hbar = 1 unless params say otherwise)"}};
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig c;
    if (j.contains("params")) c.params = phys_params_from_json(j["params"]);
    const std::string kind = j.value("noise_kind", "acceleration");
    if (kind == "acceleration") c.noise_kind = NoiseKind::acceleration;
    else if (kind == "magnetic-gradient") c.noise_kind = NoiseKind::magnetic_gradient;
    else if (kind == "quadratic") c.noise_kind = NoiseKind::quadratic;
    else throw config_error("scenario.noise_kind: unknown value '" + kind + "'");

    if (j.contains("psd")) c.psd = psd_from_json(j["psd"]);
    c.n_trials = j.value("n_trials", std::size_t{1000});
    c.t_final = j.value("t_f", 0.0);
    c.dt = j.value("dt", 0.0);
    c.master_seed = j.value("master_seed", std::uint64_t{1});
    const std::string corr = j.value("arm_correlation", "common-mode");
    if (corr == "common-mode") c.arm_correlation = ArmCorrelation::common_mode;
    else if (corr == "independent") c.arm_correlation = ArmCorrelation::independent;
    else if (corr == "anti-correlated") c.arm_correlation = ArmCorrelation::anti_correlated;
    else throw config_error("scenario.arm_correlation: unknown value '" + corr + "'");
    c.phi_diff_ideal = j.value("phi_diff_ideal", 0.0);
    if (j.contains("outputs")) c.outputs = j["outputs"].get<std::vector<std::string>>();
    c.synthesis.oversample = j.value("oversample", 8.0);
    c.validate();
    return c;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("config file '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

inline bool quantity_requested(const ScenarioConfig& config, const std::string& name) {
    if (config.outputs.empty()) return true;
    for (const auto& q : config.outputs)
        if (q == name) return true;
    return false;
}

/// Fixed-schema CSV: one row per quantity.
inline constexpr const char* kResultCsvHeader =
    "quantity,mc_mean,mc_stderr,quadrature,closed_form,units";

inline std::string results_to_csv(const ScenarioConfig& config, const ScenarioReport& report) {
    std::string out = kResultCsvHeader;
    out += "\n";
    for (const auto& [name, stats] : report.stats.quantities) {
        if (!quantity_requested(config, name)) continue;
        const auto ref_it = report.references.find(name);
        out += name + "," + detail::format_double(stats.mean) + "," +
               detail::format_double(stats.stderr_of_mean) + ",";
        if (ref_it != report.references.end() && ref_it->second.quadrature)
            out += detail::format_double(*ref_it->second.quadrature);
        out += ",";
        if (ref_it != report.references.end() && ref_it->second.closed_form)
            out += detail::format_double(*ref_it->second.closed_form);
        out += ",";
        out += (ref_it != report.references.end() && !ref_it->second.units.empty())
                   ? ref_it->second.units
                   : "dimensionless";
        out += "\n";
    }
    return out;
}

inline nlohmann::json results_to_json(const ScenarioConfig& config, const ScenarioReport& report) {
    nlohmann::json results;
    for (const auto& [name, stats] : report.stats.quantities) {
        if (!quantity_requested(config, name)) continue;
        nlohmann::json row{{"mc_mean", stats.mean},
                           {"mc_stderr", stats.stderr_of_mean},
                           {"mc_variance", stats.variance},
                           {"n", stats.n}};
        const auto ref_it = report.references.find(name);
        if (ref_it != report.references.end()) {
            if (ref_it->second.quadrature) row["quadrature"] = *ref_it->second.quadrature;
            if (ref_it->second.closed_form) row["closed_form"] = *ref_it->second.closed_form;
            row["units"] = ref_it->second.units;
        }
        results[name] = row;
    }
    return nlohmann::json{{"config", to_json(config)}, {"results", results}};
}

/// Writes CSV or JSON results; the JSON embeds the full config for
/// provenance. Byte-stable for identical inputs.
inline void emit_results(const ScenarioConfig& config, const ScenarioReport& report,
                         const std::string& format, const std::string& path) {
    std::string payload;
    if (format == "csv") {
        payload = results_to_csv(config, report);
    } else if (format == "json") {
        payload = results_to_json(config, report).dump(2);
        payload += "\n";
    } else {
        throw config_error("emit_results: format must be 'csv' or 'json'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw numeric_error("emit_results: cannot open '" + path + "' for writing");
    out << payload;
    if (!out) throw numeric_error("emit_results: write to '" + path + "' failed");
}

}  // namespace sgn
