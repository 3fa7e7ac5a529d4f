#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "largesol/nonlinearity.hpp"

namespace largesol {

/// Flat key = value configuration with dotted sections. '#' starts a
/// comment; keys are validated against the known registry so a typo is a
/// single diagnostic, never a partial run. Environment variables override
/// file values: LARGESOL_<key with '.' replaced by '__'>.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);

    void apply_env_overrides();
    void validate() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get_str(const std::string& key, const std::string& def = "") const;
    double get_num(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_list(const std::string& key,
                                 std::vector<double> def = {}) const;

    /// Builds the configured reaction term (validated thresholds).
    Nonlinearity make_nonlinearity() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    void set(const std::string& key, const std::string& value);

private:
    std::map<std::string, std::string> kv_;
};

} // namespace largesol
