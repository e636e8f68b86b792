#pragma once

// Family description shared by the CLI fixtures and the config-file loader.
// The config format is flat "key = value" text, one key per line, '#'
// comments; expression values are unquoted.

#include "minkenv/envelope.hpp"
#include "minkenv/frontal.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace minkenv {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what) {}
};

struct FamilyConfig {
    std::string name = "family";
    std::string ax, ay;
    std::string nux, nuy;  // both set or both empty
    std::string r;
    int sigma = +1;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t n_samples = 601;
    bool csv = false;
    bool svg = false;
    std::string out_dir = ".";

    bool has_gauss_map() const { return !nux.empty(); }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where, "expected a boolean, got '" + v + "'");
}

inline double parse_real(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where, "expected a real number, got '" + v + "'");
    }
}

inline ExprAst parse_checked(const std::string& src, const std::string& where) {
    try {
        return ExprAst::parse(src);
    } catch (const ParseError& e) {
        throw ConfigError(where, std::string(e.what()) + " in '" + src + "'");
    }
}

}  // namespace config_detail

/// Validates the config and parses its expressions into a CurveSpec plus
/// the radius expression. Errors carry the failing key.
struct ParsedFamily {
    CurveSpec curve;
    ExprAst radius;
    int sigma = +1;
};

inline ParsedFamily parse_family(const FamilyConfig& cfg) {
    using config_detail::parse_checked;
    if (cfg.ax.empty() || cfg.ay.empty()) throw ConfigError(cfg.name, "ax and ay are required");
    if (cfg.r.empty()) throw ConfigError(cfg.name, "r is required");
    if (cfg.nux.empty() != cfg.nuy.empty())
        throw ConfigError(cfg.name, "supply both nux and nuy, or neither");
    if (!(cfg.t_min < cfg.t_max))
        throw ConfigError(cfg.name, "t_min must be strictly less than t_max");
    if (cfg.n_samples < 16) throw ConfigError(cfg.name, "n_samples must be at least 16");
    if (cfg.sigma != +1 && cfg.sigma != -1)
        throw ConfigError(cfg.name, "sigma must be +1 or -1");

    ParsedFamily out;
    out.curve.ax = parse_checked(cfg.ax, cfg.name + ".ax");
    out.curve.ay = parse_checked(cfg.ay, cfg.name + ".ay");
    if (cfg.has_gauss_map()) {
        out.curve.nux = parse_checked(cfg.nux, cfg.name + ".nux");
        out.curve.nuy = parse_checked(cfg.nuy, cfg.name + ".nuy");
    }
    out.curve.t_min = cfg.t_min;
    out.curve.t_max = cfg.t_max;
    out.curve.n_samples = cfg.n_samples;
    out.radius = parse_checked(cfg.r, cfg.name + ".r");
    out.sigma = cfg.sigma;
    return out;
}

/// Loads a FamilyConfig from flat key = value text.
inline FamilyConfig load_config_text(const std::string& text, const std::string& source_name) {
    using namespace config_detail;
    FamilyConfig cfg;
    cfg.name = source_name;
    bool saw_tmin = false, saw_tmax = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where, "empty key");

        if (key == "ax") cfg.ax = value;
        else if (key == "ay") cfg.ay = value;
        else if (key == "nux") cfg.nux = value;
        else if (key == "nuy") cfg.nuy = value;
        else if (key == "r") cfg.r = value;
        else if (key == "sigma") {
            const double s = parse_real(value, where);
            cfg.sigma = s < 0 ? -1 : +1;
            if (s != 1.0 && s != -1.0) throw ConfigError(where, "sigma must be +1 or -1");
        } else if (key == "t_min") {
            cfg.t_min = parse_real(value, where);
            saw_tmin = true;
        } else if (key == "t_max") {
            cfg.t_max = parse_real(value, where);
            saw_tmax = true;
        } else if (key == "n_samples") {
            const double n = parse_real(value, where);
            if (n < 1 || n != std::floor(n))
                throw ConfigError(where, "n_samples must be a positive integer");
            cfg.n_samples = static_cast<std::size_t>(n);
        } else if (key == "csv") cfg.csv = parse_bool(value, where);
        else if (key == "svg") cfg.svg = parse_bool(value, where);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "name") cfg.name = value;
        else throw ConfigError(where, "unknown key '" + key + "'");
    }
    if (!saw_tmin || !saw_tmax) throw ConfigError(source_name, "t_min and t_max are required");
    // Surface validation errors (ranges, parse failures) at load time.
    parse_family(cfg);
    return cfg;
}

inline FamilyConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_text(buf.str(), path);
}

/// The worked examples, as built-in fixtures. Example 3's parameter space
/// (0, inf) is sampled on the window (0, 2); Example 4's (-2, 0) on
/// (-1.7, -0.3), inside which the Gauss map stays away from the light cone
/// and the (unbounded) envelope stays resolvable on the grid.
inline FamilyConfig example_config(int n) {
    FamilyConfig c;
    c.name = "example" + std::to_string(n);
    c.r = "1";
    c.sigma = +1;
    switch (n) {
        case 1:
            c.ax = "t^3";
            c.ay = "sqrt(1+t^6)";
            c.nux = c.ax;
            c.nuy = c.ay;
            c.t_min = -1.5;
            c.t_max = 1.5;
            break;
        case 2:
            c.ax = "cosh(t)";
            c.ay = "sinh(t)";
            c.nux = c.ax;
            c.nuy = c.ay;
            c.r = "2-t";
            c.t_min = -2.0;
            c.t_max = 2.0;
            break;
        case 3:
            c.ax = "t^2/2";
            c.ay = "t^2/2+t^3/3";
            c.nux = "t+1";
            c.nuy = "1";
            c.t_min = 0.0;
            c.t_max = 2.0;
            break;
        case 4:
            c.ax = "t^2/2";
            c.ay = "t^2/2+t^3/3";
            c.nux = "t+1";
            c.nuy = "1";
            c.t_min = -1.7;
            c.t_max = -0.3;
            break;
        case 5:
            c.ax = "0";
            c.ay = "1";
            c.nux = "cosh(t)";
            c.nuy = "sinh(t)";
            c.t_min = -2.0;
            c.t_max = 2.0;
            c.n_samples = 1201;  // keeps the bump witnesses within the 1e-6 verify budget
            break;
        default: throw ConfigError("example", "example number must be 1..5");
    }
    return c;
}

/// What each fixture is known to produce; the example runner checks these.
struct FixtureExpectation {
    CountClass::Kind kind = CountClass::NoEnvelope;
    int singular_circles = -1;  // -1: not checked
    bool all_slices_empty = false;
    bool regular_part_empty = false;
    std::optional<PseudoCircleSpec> circle;  // expected unique singular circle
};

inline FixtureExpectation example_expectation(int n) {
    switch (n) {
        case 1:
            return {CountClass::ExactlyTwo, 1, false, false,
                    PseudoCircleSpec{{0.0, 1.0}, 1.0, +1}};
        case 2: return {CountClass::Unique, 0, false, false, std::nullopt};
        case 3: return {CountClass::NoEnvelope, 0, true, false, std::nullopt};
        case 4: return {CountClass::ExactlyTwo, 0, false, false, std::nullopt};
        case 5: return {CountClass::UncountablyMany, -1, false, true, std::nullopt};
        default: throw ConfigError("example", "example number must be 1..5");
    }
}

}  // namespace minkenv
