#include "largesol/report.hpp"

#include <chrono>
#include <fstream>

namespace largesol {

std::string verdict_name(KOVerdict v) {
    switch (v) {
        case KOVerdict::satisfied: return "satisfied";
        case KOVerdict::violated: return "violated";
        case KOVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string verdict_name(BoundednessVerdict v) {
    switch (v) {
        case BoundednessVerdict::bounded: return "bounded";
        case BoundednessVerdict::unbounded: return "unbounded";
        case BoundednessVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

json to_json(const KOReport& r) {
    return json{{"verdict", verdict_name(r.verdict)},
                {"truncated_integral", r.truncated_integral},
                {"tail_exponent", r.tail_exponent},
                {"decade_exponent", r.decade_exponent},
                {"fit_residual", r.fit_residual},
                {"T_max", r.T_max},
                {"margin", r.margin}};
}

json to_json(const BoundednessReport& r) {
    return json{{"verdict", verdict_name(r.verdict)},
                {"sampled_sup", r.sampled_sup},
                {"growth_ratio_last_decade", r.growth_ratio_last_decade},
                {"n_samples", r.sample_s.size()}};
}

json to_json(const SymmetryReport& r) {
    json j;
    j["sup_variation"] = r.sup_variation;
    j["n_rings"] = r.ring_r.size();
    j["tol_refl"] = r.tol_refl;
    j["moving_plane_violations"] = r.moving_plane_violations.size();
    j["dx1_violations"] = r.dx1_violations.size();
    j["moving_plane_pass"] = r.moving_plane_pass;
    j["monotonicity_violations"] = r.monotonicity_violations.size();
    j["monotonicity_pass"] = r.monotonicity_pass;
    if (!r.moving_plane_violations.empty()) {
        double worst = 0.0;
        double lam = 0.0;
        for (const auto& v : r.moving_plane_violations) {
            if (v.deficit > worst) {
                worst = v.deficit;
                lam = v.lambda;
            }
        }
        j["worst_violation"] = json{{"lambda", lam}, {"deficit", worst}};
    }
    return j;
}

json to_json(const GnnReport& r) {
    return json{{"pass", r.pass},
                {"radial_positive", r.radial_positive},
                {"decreasing_tail", r.decreasing_tail},
                {"rho_at_098", r.rho_at_098},
                {"n_rings", r.ring_r.size()}};
}

json to_json(const SandwichReport& r) {
    return json{{"pass", r.pass},
                {"K0", r.K0},
                {"tol", r.tol},
                {"max_upper_deficit", r.max_upper_deficit},
                {"max_lower_deficit", r.max_lower_deficit}};
}

json to_json(const TangentialBoundReport& r) {
    return json{{"pass", r.pass},          {"r0", r.r0},
                {"Lstar", r.Lstar},        {"C_linear", r.C_linear},
                {"max_slack", r.max_slack}, {"violations", r.violations},
                {"r0_advanced", r.r0_advanced}};
}

json to_json(const SecondTangentialReport& r) {
    return json{{"pass", r.pass},
                {"r0", r.r0},
                {"Ltilde", r.Ltilde},
                {"violations", r.violations},
                {"two_sided_violations", r.two_sided_violations}};
}

json to_json(const RadialBlowupReport& r) {
    return json{{"pass", r.pass},
                {"strictly_increasing", r.strictly_increasing},
                {"uniformity_decreasing", r.uniformity_decreasing},
                {"k_levels", r.k_levels},
                {"min_dr", r.min_dr},
                {"uniformity", r.uniformity}};
}

json config_echo(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries()) j[k] = v;
    return j;
}

RunReport::RunReport(const RunConfig& cfg) {
    body_["schema_version"] = 1;
    body_["config"] = config_echo(cfg);
    body_["checks"] = json::array();
    body_["constants"] = json::object();
    body_["solver_stats"] = json::object();
    body_["files"] = json::array();
}

void RunReport::add_check(const std::string& name, bool pass, json detail) {
    body_["checks"].push_back(json{{"name", name},
                                   {"status", pass ? "pass" : "fail"},
                                   {"detail", std::move(detail)}});
    if (!pass) all_passed_ = false;
}

void RunReport::add_skipped(const std::string& name, const std::string& reason) {
    body_["checks"].push_back(
        json{{"name", name}, {"status", "skipped"}, {"detail", json{{"reason", reason}}}});
}

void RunReport::add_constant(const std::string& name, double value) {
    body_["constants"][name] = value;
}

void RunReport::add_file(const std::string& path) { body_["files"].push_back(path); }

void RunReport::add_solver_stats(const std::string& name, json stats) {
    body_["solver_stats"][name] = std::move(stats);
}

void RunReport::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body_.dump(2) << '\n';
}

void RunReport::write_meta(const std::string& path) const {
    const auto now = std::chrono::system_clock::now();
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    json meta{{"unix_time", secs}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << meta.dump(2) << '\n';
}

} // namespace largesol
