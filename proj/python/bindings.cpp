#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "largesol/boundary.hpp"
#include "largesol/field2d.hpp"
#include "largesol/nonlinearity.hpp"
#include "largesol/radial.hpp"
#include "largesol/symmetry.hpp"
#include "largesol/transform.hpp"

namespace py = pybind11;
using namespace largesol;

namespace {

std::string ko_verdict_str(KOVerdict v) {
    switch (v) {
        case KOVerdict::satisfied: return "satisfied";
        case KOVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Large-solution (boundary blow-up) elliptic solvers and diagnostics";

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("power", py::overload_cast<double>(&Nonlinearity::power), py::arg("q"))
        .def_static("power_thresholds",
                    py::overload_cast<double, double, double>(&Nonlinearity::power),
                    py::arg("q"), py::arg("a"), py::arg("b"))
        .def_static("exponential", &Nonlinearity::exponential)
        .def_static("power_log", &Nonlinearity::power_log, py::arg("alpha"))
        .def_static("polynomial", &Nonlinearity::polynomial, py::arg("coeffs"),
                    py::arg("a") = 0.0, py::arg("b") = 0.0)
        .def_static("cubic_minus_linear", &Nonlinearity::cubic_minus_linear,
                    py::arg("lam"))
        .def_static("tabulated", &Nonlinearity::tabulated, py::arg("xs"), py::arg("ys"),
                    py::arg("a"), py::arg("b"))
        .def_static("zero", &Nonlinearity::zero)
        .def("g", &Nonlinearity::g, py::arg("s"))
        .def("dg", &Nonlinearity::dg, py::arg("s"))
        .def("G", &Nonlinearity::G, py::arg("t"))
        .def("lipschitz_window", &Nonlinearity::lipschitz_window, py::arg("lo"),
             py::arg("hi"))
        .def_property_readonly("a_convex", &Nonlinearity::a_convex)
        .def_property_readonly("b_monotone", &Nonlinearity::b_monotone)
        .def_property_readonly("family", &Nonlinearity::family_name)
        .def("validate", &Nonlinearity::validate, py::arg("tol") = 1e-8,
             py::arg("span_factor") = 1e4);

    py::class_<KOReport>(m, "KOReport")
        .def_property_readonly("verdict",
                               [](const KOReport& r) { return ko_verdict_str(r.verdict); })
        .def_readonly("truncated_integral", &KOReport::truncated_integral)
        .def_readonly("tail_exponent", &KOReport::tail_exponent)
        .def_readonly("decade_exponent", &KOReport::decade_exponent)
        .def_readonly("T_max", &KOReport::T_max);

    m.def("check_keller_osserman", &check_keller_osserman, py::arg("nl"),
          py::arg("t_max") = 0.0, py::arg("margin") = 0.05);

    py::class_<BoundednessReport>(m, "BoundednessReport")
        .def_property_readonly("verdict",
                               [](const BoundednessReport& r) {
                                   switch (r.verdict) {
                                       case BoundednessVerdict::bounded: return "bounded";
                                       case BoundednessVerdict::unbounded: return "unbounded";
                                       default: return "inconclusive";
                                   }
                               })
        .def_readonly("sampled_sup", &BoundednessReport::sampled_sup)
        .def_readonly("growth_ratio_last_decade",
                      &BoundednessReport::growth_ratio_last_decade)
        .def_readonly("sample_s", &BoundednessReport::sample_s)
        .def_readonly("sample_value", &BoundednessReport::sample_value);

    m.def("check_bu_condition", &check_bu_condition, py::arg("nl"), py::arg("s_max"));

    m.def("eval_G", &eval_G, py::arg("nl"), py::arg("t"));
    m.def("transform_F", &transform_F, py::arg("nl"), py::arg("v"), py::arg("m"));
    m.def("inverse_F", &inverse_F, py::arg("nl"), py::arg("w"), py::arg("m"));
    m.def("coefficient_b", &coefficient_b, py::arg("nl"), py::arg("w"), py::arg("m"));

    py::class_<SplitNonlinearity>(m, "SplitNonlinearity")
        .def_readonly("M", &SplitNonlinearity::M)
        .def_property_readonly("g_inf",
                               [](const SplitNonlinearity& s) { return s.g_inf; })
        .def("g_tilde", &SplitNonlinearity::g_tilde, py::arg("s"))
        .def("k0_bound", &SplitNonlinearity::k0_bound, py::arg("lo"), py::arg("hi"));

    m.def("split_asymptotic",
          py::overload_cast<const Nonlinearity&>(&split_asymptotic), py::arg("nl"));
    m.def("split_asymptotic_at",
          py::overload_cast<const Nonlinearity&, double>(&split_asymptotic),
          py::arg("nl"), py::arg("M"));

    py::class_<RadialProfile>(m, "RadialProfile")
        .def_readonly("R", &RadialProfile::R)
        .def_readonly("N", &RadialProfile::N)
        .def_readonly("r_in", &RadialProfile::r_in)
        .def_readonly("r_nodes", &RadialProfile::r_nodes)
        .def_readonly("u_values", &RadialProfile::u_values)
        .def_readonly("du_values", &RadialProfile::du_values)
        .def_readonly("k_level", &RadialProfile::k_level)
        .def_readonly("converged", &RadialProfile::converged)
        .def_readonly("scaled_residual", &RadialProfile::scaled_residual);

    py::class_<RadialOptions>(m, "RadialOptions")
        .def(py::init<>())
        .def_readwrite("n_r", &RadialOptions::n_r)
        .def_readwrite("grading", &RadialOptions::grading)
        .def_readwrite("newton_tol", &RadialOptions::newton_tol);

    m.def(
        "solve_truncated",
        [](const Nonlinearity& nl, double R, int N, double k, const RadialOptions& o) {
            return solve_truncated(nl, R, N, k, o);
        },
        py::arg("nl"), py::arg("R"), py::arg("N"), py::arg("k"),
        py::arg("options") = RadialOptions{});

    py::class_<ContinuationResult>(m, "ContinuationResult")
        .def_readonly("profile", &ContinuationResult::profile)
        .def_readonly("k_levels", &ContinuationResult::k_levels)
        .def_readonly("interior_change", &ContinuationResult::interior_change)
        .def_readonly("monotone_in_k", &ContinuationResult::monotone_in_k)
        .def_property_readonly("status", [](const ContinuationResult& c) {
            switch (c.status) {
                case ContinuationStatus::converged: return "converged";
                case ContinuationStatus::diverging: return "diverging";
                case ContinuationStatus::inconclusive: return "inconclusive";
                default: return "solver_failure";
            }
        });

    m.def(
        "solve_large_continuation",
        [](const Nonlinearity& nl, double R, int N, std::vector<double> schedule,
           const RadialOptions& o, double stop_tol) {
            return solve_large_continuation(nl, R, N, std::move(schedule), o, stop_tol);
        },
        py::arg("nl"), py::arg("R"), py::arg("N"),
        py::arg("schedule") = std::vector<double>{}, py::arg("options") = RadialOptions{},
        py::arg("stop_tol") = 1e-6);

    m.def(
        "solve_annulus_radial",
        [](const Nonlinearity& nl, double r_in, double R, int N, double inner,
           std::vector<double> schedule, const RadialOptions& o, double stop_tol) {
            return solve_annulus_radial(nl, r_in, R, N, inner, std::move(schedule), o,
                                        stop_tol);
        },
        py::arg("nl"), py::arg("r_in"), py::arg("R"), py::arg("N"),
        py::arg("inner_value"), py::arg("schedule") = std::vector<double>{},
        py::arg("options") = RadialOptions{}, py::arg("stop_tol") = 1e-6);

    py::class_<WTransformResult>(m, "WTransformResult")
        .def_readonly("profile", &WTransformResult::profile)
        .def_readonly("w_values", &WTransformResult::w_values)
        .def_readonly("dw_values", &WTransformResult::dw_values)
        .def_readonly("w_boundary", &WTransformResult::w_boundary)
        .def_readonly("m_base", &WTransformResult::m_base)
        .def_readonly("min_u", &WTransformResult::min_u)
        .def_readonly("matched_fallback", &WTransformResult::matched_fallback);

    m.def(
        "solve_w_transform",
        [](const Nonlinearity& nl, double R, int N, const RadialOptions& o, double m_init) {
            WTransformOptions wo;
            wo.radial = o;
            wo.m_init = m_init;
            return solve_w_transform(nl, R, N, wo);
        },
        py::arg("nl"), py::arg("R"), py::arg("N"), py::arg("options") = RadialOptions{},
        py::arg("m_init") = std::numeric_limits<double>::quiet_NaN());

    py::class_<BlowupRateFit>(m, "BlowupRateFit")
        .def_readonly("exponent", &BlowupRateFit::exponent)
        .def_readonly("constant", &BlowupRateFit::constant)
        .def_readonly("residual", &BlowupRateFit::residual)
        .def_readonly("poor_fit", &BlowupRateFit::poor_fit);

    m.def("blowup_rate_fit", &blowup_rate_fit, py::arg("profile"), py::arg("window_lo"),
          py::arg("window_hi"));

    py::class_<PolarGrid>(m, "PolarGrid")
        .def_static("build", &PolarGrid::build, py::arg("r_in"), py::arg("R"),
                    py::arg("n_r"), py::arg("n_theta"), py::arg("grading") = 1.0)
        .def_readonly("r_in", &PolarGrid::r_in)
        .def_readonly("R", &PolarGrid::R)
        .def_readonly("n_r", &PolarGrid::n_r)
        .def_readonly("n_theta", &PolarGrid::n_theta)
        .def_readonly("r", &PolarGrid::r)
        .def_readonly("theta", &PolarGrid::theta);

    py::class_<PolarField>(m, "PolarField")
        .def_readonly("grid", &PolarField::grid)
        .def_readonly("values", &PolarField::values)
        .def_readonly("boundary_k", &PolarField::boundary_k)
        .def_readonly("converged", &PolarField::converged)
        .def_readonly("scaled_residual", &PolarField::scaled_residual)
        .def("at", &PolarField::at, py::arg("i_r"), py::arg("i_theta"));

    py::class_<DiskInit>(m, "DiskInit")
        .def_static("radial_lift", &DiskInit::radial_lift)
        .def_static("constant", &DiskInit::constant, py::arg("c"))
        .def_static("perturbed", &DiskInit::perturbed, py::arg("seed"),
                    py::arg("amplitude"))
        .def("on_branch", &DiskInit::on_branch, py::arg("guess"));

    py::class_<FieldOptions>(m, "FieldOptions")
        .def(py::init<>())
        .def_readwrite("newton_tol", &FieldOptions::newton_tol)
        .def_readwrite("max_iterations", &FieldOptions::max_iterations);

    m.def(
        "solve_disk",
        [](const Nonlinearity& nl, const PolarGrid& g, double k, const DiskInit& init,
           const FieldOptions& o) { return solve_disk(nl, g, k, init, o); },
        py::arg("nl"), py::arg("grid"), py::arg("k"),
        py::arg("init") = DiskInit::radial_lift(), py::arg("options") = FieldOptions{});

    m.def(
        "solve_annulus_2d",
        [](const Nonlinearity& nl, const PolarGrid& g, double k,
           const std::vector<double>& inner, const FieldOptions& o) {
            return solve_annulus_2d(nl, g, k, inner, o);
        },
        py::arg("nl"), py::arg("grid"), py::arg("k"), py::arg("inner_data"),
        py::arg("options") = FieldOptions{});

    m.def("solve_annulus_2d_continuation", &solve_annulus_2d_continuation, py::arg("nl"),
          py::arg("grid"), py::arg("k_levels"), py::arg("inner_data"),
          py::arg("options") = FieldOptions{});

    py::class_<GradientField>(m, "GradientField")
        .def_readonly("radial", &GradientField::radial)
        .def_readonly("tangential", &GradientField::tangential);
    m.def("gradient_decomposition", &gradient_decomposition, py::arg("field"));

    py::class_<SymmetryReport>(m, "SymmetryReport")
        .def_readonly("sup_variation", &SymmetryReport::sup_variation)
        .def_readonly("ring_r", &SymmetryReport::ring_r)
        .def_readonly("ring_variation", &SymmetryReport::ring_variation)
        .def_readonly("moving_plane_pass", &SymmetryReport::moving_plane_pass)
        .def_readonly("monotonicity_pass", &SymmetryReport::monotonicity_pass)
        .def_property_readonly("n_moving_plane_violations",
                               [](const SymmetryReport& r) {
                                   return r.moving_plane_violations.size();
                               })
        .def_property_readonly("n_monotonicity_violations", [](const SymmetryReport& r) {
            return r.monotonicity_violations.size();
        });

    m.def("angular_variation", &angular_variation, py::arg("field"));
    m.def("moving_plane_check", &moving_plane_check, py::arg("field"),
          py::arg("tol_refl"), py::arg("lambdas") = std::vector<double>{});
    m.def("monotonicity_check_profile",
          py::overload_cast<const RadialProfile&, MonotonicityRegion>(&monotonicity_check),
          py::arg("profile"), py::arg("region"));
    m.def("monotonicity_check_field",
          py::overload_cast<const PolarField&, MonotonicityRegion>(&monotonicity_check),
          py::arg("field"), py::arg("region"));

    py::enum_<MonotonicityRegion>(m, "MonotonicityRegion")
        .value("full_ball_minus_origin", MonotonicityRegion::full_ball_minus_origin)
        .value("outer_half_annulus", MonotonicityRegion::outer_half_annulus);

    py::class_<GnnReport>(m, "GnnReport")
        .def_readonly("pass_", &GnnReport::pass)
        .def_readonly("rho", &GnnReport::rho)
        .def_readonly("rho_at_098", &GnnReport::rho_at_098)
        .def_readonly("radial_positive", &GnnReport::radial_positive);
    m.def("gnn_hypothesis_check", &gnn_hypothesis_check, py::arg("field"));

    py::class_<SandwichReport>(m, "SandwichReport")
        .def_readonly("pass_", &SandwichReport::pass)
        .def_readonly("K0", &SandwichReport::K0)
        .def_readonly("max_upper_deficit", &SandwichReport::max_upper_deficit)
        .def_readonly("max_lower_deficit", &SandwichReport::max_lower_deficit);
    m.def("sandwich_check", &sandwich_check, py::arg("field"), py::arg("U_R"),
          py::arg("split"), py::arg("tol_rel") = 0.02);
}
