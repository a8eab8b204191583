// JSON configuration files
//
//   { "isotope": "3He" | "mass_u": .., "moment_nm": ..,
//     "B_tesla": .., "omega0_rad_s": .., "g": .., "nu": ..,
//     "xi_I": {"a":..,"b_re":..,"b_im":..,"c":..}, "xi_G": {...} }
//
// Unknown keys are rejected. An absent xi_k block means unit violation
// (a = b = c = 1); inside a block, absent entries are zero.

#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qep/core_model.hpp"

namespace qep {

using json = nlohmann::json;

struct ModelSpec {
    PhysicalConfig config{};
    ViolationModel model{ViolationModel::unit()};
};

namespace detail {

inline double number_at(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

inline ViolationOperator parse_xi(const json& j, const char* name) {
    if (!j.is_object()) throw ConfigError(std::string(name) + " must be an object");
    static const std::set<std::string> allowed{"a", "b_re", "b_im", "c"};
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + name);
    }
    ViolationOperator xi;
    if (j.contains("a")) xi.a = number_at(j, "a");
    if (j.contains("c")) xi.c = number_at(j, "c");
    double re = j.contains("b_re") ? number_at(j, "b_re") : 0.0;
    double im = j.contains("b_im") ? number_at(j, "b_im") : 0.0;
    xi.b = {re, im};
    return xi;
}

inline json xi_to_json(const ViolationOperator& xi) {
    return {{"a", xi.a}, {"b_re", xi.b.real()}, {"b_im", xi.b.imag()}, {"c", xi.c}};
}

}  // namespace detail

inline ModelSpec parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    static const std::set<std::string> allowed{"isotope", "mass_u", "moment_nm", "B_tesla",
                                               "omega0_rad_s", "g", "nu", "xi_I", "xi_G"};
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    }

    ModelSpec spec;
    try {
        if (j.contains("isotope")) {
            if (j.contains("mass_u") || j.contains("moment_nm")) {
                throw ConfigError("'isotope' cannot be combined with 'mass_u'/'moment_nm'");
            }
            if (!j.at("isotope").is_string()) throw ConfigError("'isotope' must be a string");
            spec.config = preset(j.at("isotope").get<std::string>());
        } else {
            if (!j.contains("mass_u") || !j.contains("moment_nm")) {
                throw ConfigError("either 'isotope' or both 'mass_u' and 'moment_nm' are required");
            }
            spec.config.mass_u = detail::number_at(j, "mass_u");
            spec.config.moment_nm = detail::number_at(j, "moment_nm");
        }
        if (j.contains("B_tesla")) spec.config.B = detail::number_at(j, "B_tesla");
        if (j.contains("omega0_rad_s")) spec.config.omega0 = detail::number_at(j, "omega0_rad_s");
        if (j.contains("g")) spec.config.g = detail::number_at(j, "g");
        if (j.contains("nu")) spec.config.nu = detail::number_at(j, "nu");
        if (j.contains("xi_I")) spec.model.xi_I = detail::parse_xi(j.at("xi_I"), "xi_I");
        if (j.contains("xi_G")) spec.model.xi_G = detail::parse_xi(j.at("xi_G"), "xi_G");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    validate(spec.config);
    validate(spec.model);
    return spec;
}

inline ModelSpec parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ModelSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Always written in explicit mass/moment form so it parses back to the same values.
inline json to_json(const ModelSpec& spec) {
    return {{"mass_u", spec.config.mass_u},
            {"moment_nm", spec.config.moment_nm},
            {"B_tesla", spec.config.B},
            {"omega0_rad_s", spec.config.omega0},
            {"g", spec.config.g},
            {"nu", spec.config.nu},
            {"xi_I", detail::xi_to_json(spec.model.xi_I)},
            {"xi_G", detail::xi_to_json(spec.model.xi_G)}};
}

}  // namespace qep
