#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "largesol/boundary.hpp"
#include "largesol/config.hpp"
#include "largesol/field2d.hpp"
#include "largesol/io.hpp"
#include "largesol/nonlinearity.hpp"
#include "largesol/radial.hpp"
#include "largesol/report.hpp"
#include "largesol/symmetry.hpp"
#include "largesol/transform.hpp"

namespace fs = std::filesystem;
using namespace largesol;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitViolated = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitConfig = 64;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int workers = 0;
    long long seed = -1;
    bool allow_no_blowup = false;
    bool grid_refine = false;
};

RunConfig load_config(CommonArgs& args) {
    RunConfig cfg = RunConfig::from_file(args.config_path);
    if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
    cfg.validate();
    if (args.out_dir.empty()) args.out_dir = cfg.get_str("output.dir", "");
    if (args.workers <= 0) args.workers = cfg.get_int("workers", 2);
    return cfg;
}

void ensure_out(const std::string& dir) {
    if (dir.empty()) throw std::invalid_argument("--out directory required");
    fs::create_directories(dir);
}

std::vector<double> schedule_from(const RunConfig& cfg, double k_max_def) {
    auto sched = cfg.get_list("continuation.schedule");
    if (!sched.empty()) return sched;
    return default_continuation_schedule(cfg.get_num("continuation.k_max", k_max_def));
}

// Linear interpolation of the theta=0 column to an exact radius.
double field_at_radius(const PolarField& f, double r) {
    const auto& rr = f.grid.r;
    if (r <= rr.front()) return f.at(0, 0);
    if (r >= rr.back()) return f.at(f.grid.n_r - 1, 0);
    int i = 0;
    while (rr[i + 1] < r) ++i;
    const double t = (r - rr[i]) / (rr[i + 1] - rr[i]);
    return f.at(i, 0) * (1.0 - t) + f.at(i + 1, 0) * t;
}

RadialOptions radial_opts(const RunConfig& cfg) {
    RadialOptions o;
    o.n_r = cfg.get_int("radial.n_r", 2048);
    o.grading = cfg.get_num("radial.grading", 2.0);
    o.newton_tol = cfg.get_num("solver.newton_tol", 1e-10);
    return o;
}

std::vector<double> inner_data_from(const RunConfig& cfg, const PolarGrid& grid) {
    const double c = cfg.get_num("annulus.inner_const", 2.0);
    const double amp = cfg.get_num("annulus.inner_cos_amp", 0.0);
    std::vector<double> data(grid.n_theta);
    for (int j = 0; j < grid.n_theta; ++j) data[j] = c + amp * std::cos(grid.theta[j]);
    return data;
}

std::string continuation_status_name(ContinuationStatus s) {
    switch (s) {
        case ContinuationStatus::converged: return "converged";
        case ContinuationStatus::diverging: return "diverging";
        case ContinuationStatus::inconclusive: return "inconclusive";
        case ContinuationStatus::solver_failure: return "solver_failure";
    }
    return "inconclusive";
}

// ---------------------------------------------------------------------------
// check-ko
// ---------------------------------------------------------------------------

int cmd_check_ko(CommonArgs& args) {
    RunConfig cfg = load_config(args);
    const Nonlinearity nl = cfg.make_nonlinearity();
    const KOReport rep = check_keller_osserman(nl, cfg.get_num("ko.t_max", 0.0),
                                               cfg.get_num("ko.margin", 0.05));
    json out = to_json(rep);
    if (cfg.has("bu.s_max") && rep.verdict == KOVerdict::satisfied) {
        out["bu_condition"] = to_json(check_bu_condition(nl, cfg.get_num("bu.s_max", 1e6)));
    }
    if (!args.out_dir.empty()) {
        ensure_out(args.out_dir);
        std::ofstream f(fs::path(args.out_dir) / "ko_report.json");
        f << out.dump(2) << '\n';
    }
    std::cout << out.dump(2) << '\n';
    switch (rep.verdict) {
        case KOVerdict::satisfied: return kExitOk;
        case KOVerdict::violated: return kExitViolated;
        case KOVerdict::inconclusive: return kExitInconclusive;
    }
    return kExitInternal;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(CommonArgs& args) {
    RunConfig cfg = load_config(args);
    ensure_out(args.out_dir);
    const fs::path out(args.out_dir);
    const Nonlinearity nl = cfg.make_nonlinearity();
    nl.validate();
    RunReport report(cfg);

    const bool is_zero = nl.family_name() == "zero";
    KOReport ko;
    if (!is_zero) {
        ko = check_keller_osserman(nl, cfg.get_num("ko.t_max", 0.0),
                                   cfg.get_num("ko.margin", 0.05));
        report.add_check("keller_osserman", ko.verdict == KOVerdict::satisfied, to_json(ko));
        if (ko.verdict != KOVerdict::satisfied && !args.allow_no_blowup) {
            report.write((out / "report.json").string());
            report.write_meta((out / "report.meta.json").string());
            std::cerr << "Keller-Osserman condition not satisfied; pass "
                         "--allow-no-blowup for fixed-k solves\n";
            return kExitViolated;
        }
    }

    const std::string kind = cfg.get_str("geometry.kind", "disk");
    const double R = cfg.get_num("geometry.R", 1.0);
    const int N = cfg.get_int("problem.N", 2);
    const std::string method = cfg.get_str("solver.method", "continuation");
    const RadialOptions ropts = radial_opts(cfg);
    std::vector<double> schedule = schedule_from(cfg, N == 2 ? 1e6 : 1e8);
    const double stop_tol = cfg.get_num("continuation.stop_tol", 1e-6);

    bool overall_ok = true;
    bool inconclusive = false;

    if (kind == "disk") {
        // Radial solve chain.
        ContinuationResult cont;
        if (method == "continuation" || method == "both") {
            cont = solve_large_continuation(nl, R, N, schedule, ropts, stop_tol);
            write_profile_csv(cont.profile, (out / "profile_continuation.csv").string());
            report.add_file("profile_continuation.csv");
            write_xy((out / "plot_r_u.dat").string(), cont.profile.r_nodes,
                     cont.profile.u_values);
            report.add_file("plot_r_u.dat");
            report.add_solver_stats(
                "continuation",
                json{{"status", continuation_status_name(cont.status)},
                     {"levels", cont.k_levels.size()},
                     {"monotone_in_k", cont.monotone_in_k},
                     {"final_interior_change",
                      cont.interior_change.empty() ? 0.0 : cont.interior_change.back()},
                     {"newton_iterations", cont.profile.newton_iterations},
                     {"scaled_residual", cont.profile.scaled_residual}});
            if (cont.status == ContinuationStatus::diverging) {
                report.add_check("continuation_bounded", false,
                                 json{{"reason", "interior grows along the schedule"}});
                overall_ok = false;
            } else if (cont.status == ContinuationStatus::solver_failure) {
                report.add_check("continuation_solve", false, json{});
                overall_ok = false;
            } else if (cont.status == ContinuationStatus::inconclusive) {
                inconclusive = true;
            }
        }
        WTransformResult wt;
        bool have_wt = false;
        if ((method == "w_transform" || method == "both") && !is_zero) {
            WTransformOptions wopts;
            wopts.radial = ropts;
            wopts.m_init = cfg.get_num("solver.m_init",
                                       std::numeric_limits<double>::quiet_NaN());
            wopts.base_policy = cfg.get_str("solver.w_base_policy", "pinned") == "sharp"
                                    ? WBasePolicy::sharp_min_u
                                    : WBasePolicy::pinned;
            wt = solve_w_transform(nl, R, N, wopts);
            have_wt = true;
            write_profile_csv(wt.profile, (out / "profile_w_transform.csv").string());
            report.add_file("profile_w_transform.csv");
            report.add_solver_stats(
                "w_transform",
                json{{"m_base", wt.m_base},
                     {"min_u", wt.min_u},
                     {"matched_fallback", wt.matched_fallback},
                     {"scaled_residual", wt.profile.scaled_residual}});
        }
        if (method == "both" && cont.profile.converged && have_wt) {
            double gap = 0.0;
            for (std::size_t i = 0; i < cont.profile.r_nodes.size(); ++i) {
                if (cont.profile.r_nodes[i] > 0.95 * R) break;
                gap = std::max(gap,
                               std::abs(wt.profile.u_values[i] - cont.profile.u_values[i]) /
                                   (1.0 + std::abs(cont.profile.u_values[i])));
            }
            report.add_constant("cross_method_gap", gap);
            report.add_check("cross_method_agreement", gap <= 1e-4,
                             json{{"gap", gap}, {"tolerance", 1e-4}});
            if (gap > 1e-4) overall_ok = false;
        }
        // 2D solve for N = 2.
        if (N == 2) {
            const PolarGrid grid = PolarGrid::build(
                0.0, R, cfg.get_int("grid.n_r", 256), cfg.get_int("grid.n_theta", 128),
                cfg.get_num("grid.grading", 1.0));
            DiskInit init = DiskInit::radial_lift();
            const std::string init_kind = cfg.get_str("init.kind", "radial_lift");
            if (init_kind == "constant") {
                init = DiskInit::constant(cfg.get_num("init.constant", 0.0));
            } else if (init_kind == "perturbed") {
                init = DiskInit::perturbed(
                    static_cast<std::uint64_t>(cfg.get_int("seed", 1)),
                    cfg.get_num("init.amplitude", 0.3));
            }
            FieldOptions fopts;
            fopts.newton_tol = cfg.get_num("solver.newton_tol", 1e-9);
            const double k2d = schedule.back();
            PolarField f = solve_disk(nl, grid, k2d, init, fopts);
            write_field_csv(f, (out / "field_disk.csv").string());
            report.add_file("field_disk.csv");
            report.add_solver_stats("disk_2d",
                                    json{{"converged", f.converged},
                                         {"k", k2d},
                                         {"newton_iterations", f.newton_iterations},
                                         {"scaled_residual", f.scaled_residual}});
            if (!f.converged) overall_ok = false;
            if (args.grid_refine) {
                const PolarGrid fine = PolarGrid::build(0.0, R, 2 * grid.n_r,
                                                        2 * grid.n_theta, grid.grading);
                PolarField ff = solve_disk(nl, fine, k2d, init, fopts);
                write_field_csv(ff, (out / "field_disk_refined.csv").string());
                report.add_file("field_disk_refined.csv");
                double delta = 0.0;
                for (double probe : {0.25 * R, 0.5 * R, 0.75 * R}) {
                    delta = std::max(delta, std::abs(field_at_radius(f, probe) -
                                                     field_at_radius(ff, probe)));
                }
                report.add_constant("grid_refine_delta", delta);
                report.add_constant("tol_refl", 5.0 * delta);
            }
        }
    } else {
        // Annulus.
        const double r_in = cfg.get_num("geometry.r_in", 0.5);
        const double inner_const = cfg.get_num("annulus.inner_const", 2.0);
        ContinuationResult cont = solve_annulus_radial(nl, r_in, R, N, inner_const,
                                                       schedule, ropts, stop_tol);
        write_profile_csv(cont.profile, (out / "profile_annulus.csv").string());
        report.add_file("profile_annulus.csv");
        report.add_solver_stats(
            "annulus_radial",
            json{{"status", continuation_status_name(cont.status)},
                 {"levels", cont.k_levels.size()},
                 {"scaled_residual", cont.profile.scaled_residual}});
        if (cont.status == ContinuationStatus::solver_failure ||
            cont.status == ContinuationStatus::diverging) {
            overall_ok = false;
        } else if (cont.status == ContinuationStatus::inconclusive) {
            inconclusive = true;
        }
        if (N == 2) {
            const PolarGrid grid = PolarGrid::build(
                r_in, R, cfg.get_int("grid.n_r", 256), cfg.get_int("grid.n_theta", 128),
                cfg.get_num("grid.grading", 1.0));
            const std::vector<double> inner = inner_data_from(cfg, grid);
            write_inner_data((out / "inner_data.csv").string(), inner);
            report.add_file("inner_data.csv");
            FieldOptions fopts;
            fopts.newton_tol = cfg.get_num("solver.newton_tol", 1e-9);
            auto fields = solve_annulus_2d_continuation(nl, grid, schedule, inner, fopts);
            int level = 0;
            for (const auto& f : fields) {
                char name[64];
                std::snprintf(name, sizeof(name), "field_annulus_k%02d.csv", level);
                write_field_csv(f, (out / name).string());
                report.add_file(name);
                ++level;
                if (!f.converged) overall_ok = false;
            }
            if (!fields.empty() && fields.back().converged) {
                const GnnReport gnn = gnn_hypothesis_check(fields.back());
                write_xy((out / "plot_r_rho.dat").string(), gnn.ring_r, gnn.rho);
                report.add_file("plot_r_rho.dat");
            }
        }
    }

    report.write((out / "report.json").string());
    report.write_meta((out / "report.meta.json").string());
    if (!overall_ok) return kExitViolated;
    return inconclusive ? kExitInconclusive : kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct LoadedArtifacts {
    std::vector<PolarField> fields;     // sorted by boundary_k
    std::vector<RadialProfile> profiles;
};

LoadedArtifacts load_artifacts(const std::vector<std::string>& paths) {
    LoadedArtifacts art;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw std::invalid_argument("artifact not readable: " + p);
        std::string head;
        std::getline(in, head);
        in.close();
        if (head.rfind("r_in,", 0) == 0) {
            art.fields.push_back(read_field_csv(p));
        } else if (head.rfind("R,", 0) == 0) {
            art.profiles.push_back(read_profile_csv(p));
        } else {
            throw std::invalid_argument("unrecognized artifact schema: " + p);
        }
    }
    std::sort(art.fields.begin(), art.fields.end(),
              [](const PolarField& a, const PolarField& b) {
                  return a.boundary_k < b.boundary_k;
              });
    return art;
}

int cmd_verify(CommonArgs& args, const std::vector<std::string>& artifact_paths) {
    RunConfig cfg = load_config(args);
    ensure_out(args.out_dir);
    const fs::path out(args.out_dir);
    const Nonlinearity nl = cfg.make_nonlinearity();
    RunReport report(cfg);

    LoadedArtifacts art = load_artifacts(artifact_paths);
    if (art.fields.empty() && art.profiles.empty()) {
        std::cerr << "verify: no usable artifacts passed\n";
        return kExitConfig;
    }

    std::vector<std::string> requested;
    {
        std::string run = cfg.get_str("checks.run", "all");
        std::stringstream ss(run);
        std::string tok;
        while (std::getline(ss, tok, ',')) requested.push_back(tok);
    }
    auto wants = [&](const std::string& name) {
        for (const auto& r : requested) {
            if (r == "all" || r == name) return true;
        }
        return false;
    };

    const PolarField* field = art.fields.empty() ? nullptr : &art.fields.back();
    const bool is_disk = field && field->grid.is_disk();

    // Reflection tolerance: 5x the cross-resolution delta when a refined
    // companion field is available, else the config override.
    double tol_refl = cfg.get_num("checks.tol_refl", 0.0);
    if (field && art.fields.size() >= 2) {
        const PolarField& a = art.fields[art.fields.size() - 2];
        const PolarField& b = art.fields.back();
        if (a.grid.n_r != b.grid.n_r &&
            std::abs(a.boundary_k - b.boundary_k) < 1e-9 * (1 + a.boundary_k)) {
            double delta = 0.0;
            for (double probe : {0.25, 0.5, 0.75}) {
                const double rp = a.grid.r_in + probe * (a.grid.R - a.grid.r_in);
                delta = std::max(delta,
                                 std::abs(field_at_radius(a, rp) - field_at_radius(b, rp)));
            }
            tol_refl = 5.0 * delta;
        }
    }

    if (wants("angular_variation")) {
        if (field) {
            const SymmetryReport rep = angular_variation(*field);
            report.add_constant("sup_variation", rep.sup_variation);
            if (is_disk) {
                const double bound =
                    tol_refl > 0.0 ? tol_refl : 1e-6 * (1 + field->boundary_k);
                report.add_check("angular_variation", rep.sup_variation <= bound,
                                 json{{"sup_variation", rep.sup_variation},
                                      {"tolerance", bound}});
            } else {
                // Theta-dependent inner data carries genuine variation; the
                // claim on the annulus is its decay toward the blow-up ring.
                const double inner_var = rep.ring_variation.front();
                const double outer_var = rep.ring_variation.back();
                const bool pass = inner_var <= 1e-12 * (1 + field->boundary_k) ||
                                  outer_var <= inner_var / 20.0;
                report.add_check("angular_variation_decay", pass,
                                 json{{"inner_variation", inner_var},
                                      {"outer_variation", outer_var}});
            }
        } else {
            report.add_skipped("angular_variation", "needs a 2D field artifact");
        }
    }
    if (wants("moving_plane")) {
        if (field && is_disk) {
            const double tol = tol_refl > 0.0 ? tol_refl : 1e-6 * (1 + field->boundary_k);
            const SymmetryReport rep = moving_plane_check(*field, tol);
            report.add_check("moving_plane", rep.moving_plane_pass, to_json(rep));
            std::vector<double> lam, cnt;
            for (std::size_t i = 0; i < rep.lambda_used.size(); ++i) {
                lam.push_back(rep.lambda_used[i]);
                double c = 0;
                for (const auto& v : rep.moving_plane_violations) {
                    if (v.lambda == rep.lambda_used[i]) ++c;
                }
                cnt.push_back(c);
            }
            write_xy((out / "plot_lambda_violations.dat").string(), lam, cnt);
            report.add_file("plot_lambda_violations.dat");
        } else {
            report.add_skipped("moving_plane", "needs a 2D disk field artifact");
        }
    }
    if (wants("monotonicity")) {
        if (field) {
            const auto region = is_disk ? MonotonicityRegion::full_ball_minus_origin
                                        : MonotonicityRegion::outer_half_annulus;
            const SymmetryReport rep = monotonicity_check(*field, region);
            report.add_check("monotonicity", rep.monotonicity_pass, to_json(rep));
        } else if (!art.profiles.empty()) {
            const RadialProfile& p = art.profiles.back();
            const auto region = p.r_in > 0.0 ? MonotonicityRegion::outer_half_annulus
                                             : MonotonicityRegion::full_ball_minus_origin;
            const SymmetryReport rep = monotonicity_check(p, region);
            report.add_check("monotonicity", rep.monotonicity_pass, to_json(rep));
        }
    }
    if (wants("gnn")) {
        if (field) {
            const GnnReport rep = gnn_hypothesis_check(*field);
            report.add_check("gnn_hypothesis", rep.pass, to_json(rep));
        } else {
            report.add_skipped("gnn_hypothesis", "needs a 2D field artifact");
        }
    }
    if (wants("sandwich")) {
        if (field && !art.profiles.empty()) {
            const RadialProfile* ur = nullptr;
            for (const auto& p : art.profiles) {
                if (std::abs(p.k_level - field->boundary_k) <=
                    1e-9 * (1 + std::abs(field->boundary_k))) {
                    ur = &p;
                }
            }
            if (!ur) {
                report.add_skipped("sandwich", "no U_R profile at the field's k-level");
            } else {
                const SplitNonlinearity split = split_asymptotic(nl);
                const SandwichReport rep = sandwich_check(
                    *field, *ur, split, cfg.get_num("checks.bound_tol", 0.02));
                report.add_constant("K0", rep.K0);
                report.add_check("sandwich", rep.pass, to_json(rep));
            }
        } else {
            report.add_skipped("sandwich", "needs a 2D field and a U_R profile");
        }
    }
    if (wants("tangential")) {
        if (field && !is_disk) {
            const double btol = cfg.get_num("checks.bound_tol", 0.02);
            const TangentialBoundReport rep =
                tangential_bound_check(*field, split_asymptotic(nl).M, btol);
            report.add_constant("Lstar", rep.Lstar);
            json detail = to_json(rep);
            detail["tolerance"] = btol;
            report.add_check("tangential_bound", rep.pass, std::move(detail));
        } else {
            report.add_skipped("tangential_bound", "needs a 2D annulus field");
        }
    }
    if (wants("second_tangential")) {
        if (field && !is_disk) {
            const double btol = cfg.get_num("checks.bound_tol", 0.02);
            const SecondTangentialReport rep =
                second_tangential_bound_check(*field, split_asymptotic(nl).M, btol);
            report.add_constant("Ltilde", rep.Ltilde);
            json detail = to_json(rep);
            detail["tolerance"] = btol;
            report.add_check("second_tangential_bound", rep.pass, std::move(detail));
        } else {
            report.add_skipped("second_tangential_bound", "needs a 2D annulus field");
        }
    }
    if (wants("radial_blowup")) {
        if (art.fields.size() >= 3) {
            const RadialBlowupReport rep = radial_blowup_check(
                art.fields, cfg.get_num("checks.probe_frac", 0.97));
            report.add_check("radial_blowup", rep.pass, to_json(rep));
        } else {
            report.add_skipped("radial_blowup", "needs >= 3 continuation-level fields");
        }
    }

    report.write((out / "verify_report.json").string());
    report.write_meta((out / "verify_report.meta.json").string());
    std::cout << report.body()["checks"].dump(2) << '\n';
    return report.all_passed() ? kExitOk : kExitViolated;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(CommonArgs& args) {
    RunConfig cfg = load_config(args);
    ensure_out(args.out_dir);
    const fs::path out(args.out_dir);
    const std::string param = cfg.get_str("sweep.parameter");
    const std::vector<double> values = cfg.get_list("sweep.values");
    if (param.empty()) {
        std::cerr << "sweep: sweep.parameter missing\n";
        return kExitConfig;
    }

    struct Row {
        double value = 0.0;
        std::string ko = "n/a";
        double exponent = 0.0, constant = 0.0, u0 = 0.0;
        bool failed = false;
        std::string note;
    };
    std::vector<Row> rows(values.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, args.workers);

    auto member = [&](std::size_t idx) {
        Row& row = rows[idx];
        row.value = values[idx];
        try {
            RunConfig sub = cfg;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", values[idx]);
            sub.set(param, buf);
            sub.validate();
            const Nonlinearity nl = sub.make_nonlinearity();
            const KOReport ko = check_keller_osserman(nl, sub.get_num("ko.t_max", 0.0),
                                                      sub.get_num("ko.margin", 0.05));
            row.ko = verdict_name(ko.verdict);
            if (ko.verdict != KOVerdict::satisfied) {
                row.failed = true;
                row.note = "keller-osserman " + row.ko;
                return;
            }
            RadialOptions ro = radial_opts(sub);
            const double R = sub.get_num("geometry.R", 1.0);
            const int N = sub.get_int("problem.N", 2);
            auto cont = solve_large_continuation(nl, R, N, schedule_from(sub, 1e8), ro,
                                                 sub.get_num("continuation.stop_tol", 1e-6));
            if (cont.status == ContinuationStatus::solver_failure ||
                cont.status == ContinuationStatus::diverging) {
                row.failed = true;
                row.note = continuation_status_name(cont.status);
                return;
            }
            if (cont.status == ContinuationStatus::inconclusive) {
                row.note = "continuation inconclusive at schedule end";
            }
            row.u0 = cont.profile.u_values.front();
            const auto fit = blowup_rate_fit(cont.profile, R * (1.0 - 3e-2), R * (1.0 - 1e-3));
            row.exponent = fit.exponent;
            row.constant = fit.constant;
            if (fit.poor_fit) row.note += std::string(row.note.empty() ? "" : "; ") + "poor power fit";
        } catch (const std::exception& e) {
            row.failed = true;
            row.note = e.what();
        }
    };

    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= rows.size()) return;
                member(idx);
            }
        });
    }
    for (auto& t : pool) t.join();

    std::ofstream table(out / "sweep.csv");
    table << "value,ko_verdict,exponent,constant,u0,status,note\n";
    for (const auto& row : rows) {
        table << row.value << ',' << row.ko << ',' << row.exponent << ','
              << row.constant << ',' << row.u0 << ','
              << (row.failed ? "failed" : "ok") << ',' << row.note << '\n';
    }
    std::vector<double> xs, es;
    for (const auto& row : rows) {
        if (!row.failed) {
            xs.push_back(row.value);
            es.push_back(row.exponent);
        }
    }
    write_xy((out / "plot_value_exponent.dat").string(), xs, es);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Large-solution (boundary blow-up) solver and diagnostics"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> artifacts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "flat key=value config file")
            ->required();
        sub->add_option("--out", args.out_dir, "output directory (or config output.dir)");
        sub->add_option("--workers", args.workers, "parallel workers (sweep)");
        sub->add_option("--seed", args.seed, "override config seed");
        sub->add_flag("--allow-no-blowup", args.allow_no_blowup,
                      "permit fixed-k solves when the tail test fails");
        sub->add_flag("--grid-refine", args.grid_refine,
                      "also solve on a doubled grid and record the delta");
    };

    CLI::App* ko = app.add_subcommand("check-ko", "Keller-Osserman tail test");
    add_common(ko);
    CLI::App* solve = app.add_subcommand("solve", "run the configured solver chain");
    add_common(solve);
    CLI::App* verify = app.add_subcommand("verify", "run checks on solve artifacts");
    add_common(verify);
    verify->add_option("artifacts", artifacts, "field/profile CSV files");
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (ko->parsed()) return cmd_check_ko(args);
        if (solve->parsed()) return cmd_solve(args);
        if (verify->parsed()) return cmd_verify(args, artifacts);
        if (sweep->parsed()) return cmd_sweep(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitConfig;
}
