#include "mgt/config.hpp"
#include "mgt/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mgt {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

const std::set<std::string> kKnownKeys = {
    "schema_version", "n", "p", "beta", "eps_list", "R", "profile", "u1_scale", "u2_scale",
    "bump_sharpness", "half_width", "points_per_dim", "dt", "t_max", "blowup_amplitude",
    "picard_tol", "picard_max_iter", "dealias", "forcing", "output_interval", "threads",
    "output_dir", "mode", "custom_file", "lambda0", "quad_nodes", "robustness_gate"};

double get_number(const json& doc, const std::string& key, double fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key, "expected a finite number");
    return x;
}

int get_int(const json& doc, const std::string& key, int fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& doc, const std::string& key, bool fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& doc, const std::string& key, const std::string& fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

DataProfile profile_from_string(const std::string& s) {
    if (s == "bump") return DataProfile::bump;
    if (s == "gaussian_truncated") return DataProfile::gaussian_truncated;
    if (s == "custom_file") return DataProfile::custom_file;
    throw ConfigError("profile", "unknown profile '" + s + "' (bump, gaussian_truncated, custom_file)");
}

RunMode mode_from_string(const std::string& s) {
    if (s == "subcritical") return RunMode::subcritical;
    if (s == "critical") return RunMode::critical;
    throw ConfigError("mode", "unknown mode '" + s + "' (subcritical, critical)");
}

} // namespace

std::string to_string(DataProfile p) {
    switch (p) {
    case DataProfile::bump: return "bump";
    case DataProfile::gaussian_truncated: return "gaussian_truncated";
    case DataProfile::custom_file: return "custom_file";
    }
    return "bump";
}

std::string to_string(RunMode m) { return m == RunMode::critical ? "critical" : "subcritical"; }

double SweepConfig::effective_half_width() const {
    return half_width > 0.0 ? half_width : R + solver.t_max + 2.0;
}

SpatialGrid SweepConfig::make_grid() const {
    return mgt::make_grid(n, effective_half_width(), points_per_dim);
}

SweepConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("", "top level must be an object");
    for (const auto& item : doc.items())
        if (!kKnownKeys.count(item.key())) throw ConfigError(item.key(), "unknown field");

    SweepConfig c;
    c.schema_version = get_int(doc, "schema_version", kSchemaVersion);
    check(c.schema_version == kSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(c.schema_version));

    if (!doc.contains("n")) throw ConfigError("n", "required field missing");
    c.n = get_int(doc, "n", 1);
    check(c.n >= 1 && c.n <= 3, "n", "must be 1, 2 or 3");

    SolverConfig& s = c.solver;
    s.p = get_number(doc, "p", s.p);
    check(s.p > 1.0, "p", "must exceed 1");
    s.beta = get_number(doc, "beta", s.beta);
    check(s.beta > 0.0, "beta", "must be positive");
    s.dt = get_number(doc, "dt", s.dt);
    check(s.dt >= 0.0, "dt", "must be nonnegative (0 selects spacing/4)");
    s.t_max = get_number(doc, "t_max", s.t_max);
    check(s.t_max > 0.0, "t_max", "must be positive");
    s.blowup_amplitude = get_number(doc, "blowup_amplitude", s.blowup_amplitude);
    check(s.blowup_amplitude > 0.0, "blowup_amplitude", "must be positive");
    s.picard_tol = get_number(doc, "picard_tol", s.picard_tol);
    check(s.picard_tol > 0.0, "picard_tol", "must be positive");
    s.picard_max_iter = get_int(doc, "picard_max_iter", s.picard_max_iter);
    check(s.picard_max_iter >= 1, "picard_max_iter", "must be at least 1");
    if (doc.contains("dealias") && !doc.at("dealias").is_null())
        s.dealias = get_bool(doc, "dealias", true);
    s.forcing = get_bool(doc, "forcing", s.forcing);
    s.output_interval = get_number(doc, "output_interval", s.output_interval);
    check(s.output_interval >= 0.0, "output_interval", "must be nonnegative");

    if (!doc.contains("eps_list")) throw ConfigError("eps_list", "required field missing");
    const json& eps = doc.at("eps_list");
    check(eps.is_array(), "eps_list", "expected an array of numbers");
    check(!eps.empty(), "eps_list", "must not be empty");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const std::string key = "eps_list[" + std::to_string(i) + "]";
        check(eps[i].is_number(), key, "expected a number");
        const double e = eps[i].get<double>();
        check(std::isfinite(e) && e > 0.0, key, "must be positive");
        check(c.eps_list.empty() || e < c.eps_list.back(), key, "must be smaller than the previous entry (eps_list is strictly decreasing)");
        c.eps_list.push_back(e);
    }

    c.R = get_number(doc, "R", c.R);
    check(c.R > 0.0, "R", "must be positive");
    c.profile = profile_from_string(get_string(doc, "profile", to_string(c.profile)));
    c.u1_scale = get_number(doc, "u1_scale", c.u1_scale);
    check(c.u1_scale >= 0.0, "u1_scale", "must be nonnegative");
    c.u2_scale = get_number(doc, "u2_scale", c.u2_scale);
    check(c.u2_scale >= 0.0, "u2_scale", "must be nonnegative");
    c.bump_sharpness = get_number(doc, "bump_sharpness", c.bump_sharpness);
    check(c.bump_sharpness > 0.0, "bump_sharpness", "must be positive");
    c.half_width = get_number(doc, "half_width", c.half_width);
    check(c.half_width >= 0.0, "half_width", "must be nonnegative (0 selects R + t_max + 2)");
    if (c.half_width > 0.0)
        check(c.half_width >= c.R + s.t_max + 2.0, "half_width",
              "must be at least R + t_max + 2 to hold the support cone");
    c.points_per_dim = get_int(doc, "points_per_dim", c.points_per_dim);
    check(c.points_per_dim >= 8 && c.points_per_dim % 2 == 0, "points_per_dim",
          "must be even and at least 8");
    c.threads = get_int(doc, "threads", c.threads);
    check(c.threads >= 1, "threads", "must be at least 1");
    c.output_dir = get_string(doc, "output_dir", c.output_dir.string());
    check(!c.output_dir.empty(), "output_dir", "must not be empty");
    c.mode = mode_from_string(get_string(doc, "mode", to_string(c.mode)));
    c.custom_file = get_string(doc, "custom_file", "");
    if (c.profile == DataProfile::custom_file)
        check(!c.custom_file.empty(), "custom_file", "required by profile custom_file");
    c.lambda0 = get_number(doc, "lambda0", c.lambda0);
    check(c.lambda0 > 0.0, "lambda0", "must be positive");
    c.quad_nodes = get_int(doc, "quad_nodes", c.quad_nodes);
    check(c.quad_nodes >= 2, "quad_nodes", "must be at least 2");
    c.robustness_gate = get_bool(doc, "robustness_gate", c.robustness_gate);
    return c;
}

SweepConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", path.string() + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.path(), e.detail() + " (in " + path.string() + ")");
    }
}

std::string config_to_json(const SweepConfig& c) {
    const SolverConfig& s = c.solver;
    json j{{"schema_version", c.schema_version},
           {"n", c.n},
           {"p", s.p},
           {"beta", s.beta},
           {"eps_list", c.eps_list},
           {"R", c.R},
           {"profile", to_string(c.profile)},
           {"u1_scale", c.u1_scale},
           {"u2_scale", c.u2_scale},
           {"bump_sharpness", c.bump_sharpness},
           {"half_width", c.half_width},
           {"points_per_dim", c.points_per_dim},
           {"dt", s.dt},
           {"t_max", s.t_max},
           {"blowup_amplitude", s.blowup_amplitude},
           {"picard_tol", s.picard_tol},
           {"picard_max_iter", s.picard_max_iter},
           {"dealias", s.dealias ? json(*s.dealias) : json(nullptr)},
           {"forcing", s.forcing},
           {"output_interval", s.output_interval},
           {"threads", c.threads},
           {"output_dir", c.output_dir.string()},
           {"mode", to_string(c.mode)},
           {"custom_file", c.custom_file.string()},
           {"lambda0", c.lambda0},
           {"quad_nodes", c.quad_nodes},
           {"robustness_gate", c.robustness_gate}};
    return j.dump(2);
}

} // namespace mgt
