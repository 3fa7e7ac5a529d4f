#include "largesol/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

extern "C" char** environ;

namespace largesol {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "nonlinearity.family", "nonlinearity.q", "nonlinearity.alpha",
        "nonlinearity.lambda", "nonlinearity.coeffs", "nonlinearity.a",
        "nonlinearity.b", "nonlinearity.table_x", "nonlinearity.table_y",
        "geometry.kind", "geometry.R", "geometry.r_in",
        "problem.N",
        "grid.n_r", "grid.n_theta", "grid.grading",
        "radial.n_r", "radial.grading",
        "continuation.k_max", "continuation.schedule", "continuation.stop_tol",
        "solver.method", "solver.m_init", "solver.w_base_policy",
        "solver.newton_tol",
        "annulus.inner_const", "annulus.inner_cos_amp",
        "init.kind", "init.constant", "init.amplitude",
        "ko.t_max", "ko.margin",
        "bu.s_max",
        "checks.run", "checks.tol_refl", "checks.bound_tol", "checks.probe_frac",
        "output.dir",
        "seed", "workers",
        "sweep.parameter", "sweep.values",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key");
        }
        cfg.kv_[key] = value;
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg = from_string(ss.str());
    cfg.apply_env_overrides();
    return cfg;
}

void RunConfig::apply_env_overrides() {
    const std::string prefix = "LARGESOL_";
    for (char** e = environ; e && *e; ++e) {
        std::string entry(*e);
        if (entry.rfind(prefix, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(prefix.size(), eq - prefix.size());
        std::string key;
        for (std::size_t i = 0; i < name.size(); ++i) {
            if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_') {
                key += '.';
                ++i;
            } else {
                key += name[i];
            }
        }
        kv_[key] = entry.substr(eq + 1);
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

void RunConfig::validate() const {
    for (const auto& [key, value] : kv_) {
        if (!known_keys().count(key)) {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    if (!kv_.count("nonlinearity.family")) {
        throw std::invalid_argument("config missing nonlinearity.family");
    }
    make_nonlinearity(); // throws on malformed family parameters
    const std::string kind = get_str("geometry.kind", "disk");
    if (kind != "disk" && kind != "annulus") {
        throw std::invalid_argument("geometry.kind must be disk or annulus");
    }
    const double R = get_num("geometry.R", 1.0);
    if (!(R > 0.0)) throw std::invalid_argument("geometry.R must be positive");
    if (kind == "annulus") {
        const double r_in = get_num("geometry.r_in", -1.0);
        if (!(r_in > 0.0 && r_in < R)) {
            throw std::invalid_argument("annulus needs 0 < geometry.r_in < geometry.R");
        }
    }
    const int N = get_int("problem.N", 2);
    if (N < 2) throw std::invalid_argument("problem.N must be >= 2");
    const int nt = get_int("grid.n_theta", 128);
    if (nt < 16 || nt % 2 != 0) {
        throw std::invalid_argument("grid.n_theta must be even and >= 16");
    }
    const std::string method = get_str("solver.method", "continuation");
    if (method != "continuation" && method != "w_transform" && method != "both") {
        throw std::invalid_argument("solver.method must be continuation|w_transform|both");
    }
    const std::string policy = get_str("solver.w_base_policy", "pinned");
    if (policy != "pinned" && policy != "sharp") {
        throw std::invalid_argument("solver.w_base_policy must be pinned|sharp");
    }
}

std::string RunConfig::get_str(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double RunConfig::get_num(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) {
        throw std::invalid_argument("config key " + key + ": bad number '" +
                                    it->second + "'");
    }
    return v;
}

int RunConfig::get_int(const std::string& key, int def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    return static_cast<int>(get_num(key, def));
}

bool RunConfig::get_bool(const std::string& key, bool def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config key " + key + ": bad boolean '" + it->second + "'");
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        std::vector<double> def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

Nonlinearity RunConfig::make_nonlinearity() const {
    const std::string family = get_str("nonlinearity.family");
    Nonlinearity nl;
    if (family == "power") {
        const double q = get_num("nonlinearity.q", 0.0);
        if (has("nonlinearity.a") || has("nonlinearity.b")) {
            nl = Nonlinearity::power(q, get_num("nonlinearity.a", 0.0),
                                     get_num("nonlinearity.b", 0.0));
        } else {
            nl = Nonlinearity::power(q);
        }
    } else if (family == "exponential") {
        nl = Nonlinearity::exponential();
    } else if (family == "power_log") {
        nl = Nonlinearity::power_log(get_num("nonlinearity.alpha", 0.0));
    } else if (family == "polynomial") {
        nl = Nonlinearity::polynomial(get_list("nonlinearity.coeffs"),
                                      get_num("nonlinearity.a", 0.0),
                                      get_num("nonlinearity.b", 0.0));
    } else if (family == "cubic_minus_linear") {
        nl = Nonlinearity::cubic_minus_linear(get_num("nonlinearity.lambda", 0.0));
    } else if (family == "tabulated") {
        nl = Nonlinearity::tabulated(get_list("nonlinearity.table_x"),
                                     get_list("nonlinearity.table_y"),
                                     get_num("nonlinearity.a", 0.0),
                                     get_num("nonlinearity.b", 0.0));
    } else if (family == "zero") {
        nl = Nonlinearity::zero();
    } else {
        throw std::invalid_argument("unknown nonlinearity.family: " + family);
    }
    return nl;
}

} // namespace largesol
