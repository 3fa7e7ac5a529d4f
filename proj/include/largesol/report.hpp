#pragma once

#include <string>

#include <json.hpp>

#include "largesol/boundary.hpp"
#include "largesol/config.hpp"
#include "largesol/nonlinearity.hpp"
#include "largesol/radial.hpp"
#include "largesol/symmetry.hpp"

namespace largesol {

using json = nlohmann::ordered_json;

json to_json(const KOReport& r);
json to_json(const BoundednessReport& r);
json to_json(const SymmetryReport& r);
json to_json(const GnnReport& r);
json to_json(const SandwichReport& r);
json to_json(const TangentialBoundReport& r);
json to_json(const SecondTangentialReport& r);
json to_json(const RadialBlowupReport& r);
json config_echo(const RunConfig& cfg);

std::string verdict_name(KOVerdict v);
std::string verdict_name(BoundednessVerdict v);

/// Deterministic run report: schema version, config echo, checks with the
/// tolerances they were judged against, measured constants, file manifest.
/// Timestamps live in a sibling meta file so reports stay byte-identical
/// for identical config + seed.
class RunReport {
public:
    explicit RunReport(const RunConfig& cfg);

    void add_check(const std::string& name, bool pass, json detail);
    void add_skipped(const std::string& name, const std::string& reason);
    void add_constant(const std::string& name, double value);
    void add_file(const std::string& path);
    void add_solver_stats(const std::string& name, json stats);

    bool all_passed() const { return all_passed_; }
    const json& body() const { return body_; }

    void write(const std::string& path) const;
    void write_meta(const std::string& path) const;

private:
    json body_;
    bool all_passed_ = true;
};

} // namespace largesol
