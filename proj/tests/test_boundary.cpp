#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "largesol/boundary.hpp"
#include "largesol/interp.hpp"

using namespace largesol;

TEST_CASE("barrier endpoint values") {
    Barrier b2{1.0, 2, 0.5};
    CHECK(b2.phi(0.0) == doctest::Approx(0.25));
    CHECK(b2.phi(1.0) == doctest::Approx(0.0));
    CHECK(b2.P(0.5) == doctest::Approx(1.0));
    CHECK(b2.P(1.0) == doctest::Approx(0.0));

    Barrier b3{1.0, 3, 0.5};
    CHECK(b3.P(0.5) == doctest::Approx(1.0));
    CHECK(b3.P(1.0) == doctest::Approx(0.0));
    CHECK(b3.P(0.75) == doctest::Approx((4.0 / 3.0 - 1.0) / (2.0 - 1.0)).epsilon(1e-12));
}

TEST_CASE("discrete harmonicity of the barrier pair is second order") {
    for (int N : {2, 3}) {
        Barrier bar{1.0, N, 0.5};
        for (int n : {256, 512}) {
            const double h = 0.5 / (n + 1);
            const auto c = bar.discrete_harmonicity(n);
            CHECK(c.max_P_residual <= 10.0 * h * h);
            CHECK(c.max_phi_residual <= 1e-9); // phi is quadratic: exact stencil
        }
    }
    // The N = 2 potential has no stencil superconvergence, so the order
    // shows up as a clean refinement ratio.
    Barrier b2{1.0, 2, 0.5};
    CHECK(b2.discrete_harmonicity(256).max_P_residual /
              b2.discrete_harmonicity(512).max_P_residual >=
          3.0);
}

namespace {

struct AnnulusSetup {
    PolarGrid grid;
    std::vector<PolarField> fields;
    std::vector<double> k_levels{1e3, 1e4, 1e5, 1e6};
};

const AnnulusSetup& cos_annulus() {
    static AnnulusSetup setup = [] {
        AnnulusSetup s;
        s.grid = PolarGrid::build(0.5, 1.0, 128, 64);
        std::vector<double> inner(s.grid.n_theta);
        for (int j = 0; j < s.grid.n_theta; ++j) {
            inner[j] = 2.0 + 0.5 * std::cos(s.grid.theta[j]);
        }
        s.fields = solve_annulus_2d_continuation(Nonlinearity::power(3.0), s.grid,
                                                 s.k_levels, inner, {});
        return s;
    }();
    return setup;
}

} // namespace

TEST_CASE("tangential first-derivative bound") {
    const auto& s = cos_annulus();
    REQUIRE(s.fields.back().converged);
    const auto rep = tangential_bound_check(s.fields.back(), 0.0, 0.02);
    CHECK(rep.pass);
    CHECK(rep.Lstar > 0.3);
    CHECK(rep.violations == 0);
    // Linear envelope near the boundary exists.
    CHECK(rep.C_linear > 0.0);

    // Radial field: the bound is trivial.
    PolarField radial = s.fields.back();
    for (int i = 0; i < radial.grid.n_r; ++i) {
        for (int j = 1; j < radial.grid.n_theta; ++j) {
            radial.values[radial.grid.idx(i, j)] = radial.at(i, 0);
        }
    }
    const auto triv = tangential_bound_check(radial, 0.0, 0.02);
    CHECK(triv.pass);
    CHECK(triv.Lstar == doctest::Approx(0.0));
}

TEST_CASE("one-sided second tangential bound with two-sided negative control") {
    const auto& s = cos_annulus();
    const auto rep = second_tangential_bound_check(s.fields.back(), 0.0, 0.02, false);
    CHECK(rep.pass);
    CHECK(rep.Ltilde > 0.0);

    // A narrow bump makes the negative swing of u_thetatheta exceed the
    // one-sided constant: the two-sided variant must fail, the one-sided
    // must not flag those negative values.
    auto grid = s.grid;
    std::vector<double> inner(grid.n_theta);
    const double pi = std::acos(-1.0);
    for (int j = 0; j < grid.n_theta; ++j) {
        const double d = grid.theta[j] - pi;
        inner[j] = 2.0 + 0.5 * std::cos(grid.theta[j]) + 1.2 * std::exp(-8.0 * d * d);
    }
    auto fields = solve_annulus_2d_continuation(Nonlinearity::power(3.0), grid,
                                                {1e3, 1e4}, inner, {});
    REQUIRE(fields.back().converged);
    const auto ctrl = second_tangential_bound_check(fields.back(), 0.0, 0.02, true);
    CHECK(ctrl.pass);                     // one-sided bound still holds
    CHECK(ctrl.two_sided_violations > 0); // the unclaimed lower bound fails
}

TEST_CASE("radial derivative blow-up trend across continuation levels") {
    const auto& s = cos_annulus();
    const auto rep = radial_blowup_check(s.fields, 0.97);
    CHECK(rep.pass);
    CHECK(rep.strictly_increasing);
    CHECK(rep.uniformity_decreasing);
    REQUIRE(rep.min_dr.size() == 4);
    CHECK(rep.min_dr[1] > rep.min_dr[0] * 1.001);

    // Negative control: fixed-k fields at the same level saturate.
    std::vector<PolarField> same{s.fields[3], s.fields[3], s.fields[3]};
    const auto flat = radial_blowup_check(same, 0.97);
    CHECK(!flat.pass);
    CHECK(!flat.strictly_increasing);
}

TEST_CASE("minimal comparison solution stays below the field") {
    const auto& s = cos_annulus();
    auto split = split_asymptotic(Nonlinearity::power(3.0));
    RadialOptions ro;
    ro.n_r = s.grid.n_r;
    ro.grading = 1.0;
    const auto rep = minimal_comparison_z(s.fields.back(), split, 0.55,
                                          {1e3, 1e4, 1e5, 1e6}, ro);
    CHECK(rep.u_dominates);
    CHECK(rep.z.converged);
    REQUIRE(rep.ginf_integral.size() == 4);
    // The g_inf integral grows without bound along the schedule.
    CHECK(rep.ginf_integral.back() / rep.ginf_integral.front() >= 1e3);
}

TEST_CASE("sandwich bound on the dipping annulus") {
    auto nl = Nonlinearity::cubic_minus_linear(5.0);
    auto grid = PolarGrid::build(0.5, 1.0, 128, 64);
    std::vector<double> inner(grid.n_theta, 1.0);
    auto fields = solve_annulus_2d_continuation(nl, grid, {10, 100, 1e3, 1e4}, inner, {});
    REQUIRE(fields.back().converged);
    auto split = split_asymptotic(nl);
    RadialOptions ro;
    ro.n_r = grid.n_r;
    ro.grading = 1.0;
    std::vector<double> prev;
    RadialProfile ur;
    for (double k : {10.0, 100.0, 1e3, 1e4}) {
        ur = solve_annulus_truncated(split.g_inf, 0.5, 1.0, 2, 1.0, k, ro,
                                     prev.empty() ? nullptr : &prev);
        prev = ur.u_values;
    }
    REQUIRE(ur.converged);
    const auto rep = sandwich_check(fields.back(), ur, split);
    CHECK(rep.pass);
    CHECK(rep.K0 == doctest::Approx(10.0 * std::sqrt(5.0 / 3.0) / 3.0).epsilon(1e-6));

    // Mismatched truncation levels are rejected.
    CHECK_THROWS_AS(sandwich_check(fields[0], ur, split), std::invalid_argument);
}

TEST_CASE("degenerate sandwich for a globally convex increasing reaction") {
    auto cube = Nonlinearity::power(3.0);
    auto grid = PolarGrid::build(0.0, 1.0, 96, 32);
    auto f = solve_disk(cube, grid, 1e3, DiskInit::radial_lift());
    REQUIRE(f.converged);
    auto split = split_asymptotic(cube); // M = 0, g_tilde == 0
    RadialOptions ro;
    ro.n_r = grid.n_r;
    ro.grading = 1.0;
    std::vector<double> prev;
    RadialProfile ur;
    for (double k : {10.0, 100.0, 1e3}) {
        ur = solve_truncated(split.g_inf, 1.0, 2, k, ro, prev.empty() ? nullptr : &prev);
        prev = ur.u_values;
    }
    const auto rep = sandwich_check(f, ur, split);
    CHECK(rep.K0 == doctest::Approx(0.0));
    CHECK(rep.pass); // |u - U_R| <= tol with a zero-width sandwich
}

TEST_CASE("r0 advances outward when the inner rings sit below the threshold") {
    auto nl = Nonlinearity::cubic_minus_linear(5.0);
    auto grid = PolarGrid::build(0.5, 1.0, 96, 32);
    std::vector<double> inner(grid.n_theta, 1.0);
    auto fields = solve_annulus_2d_continuation(nl, grid, {10, 100, 1e3}, inner, {});
    REQUIRE(fields.back().converged);
    const auto rep = tangential_bound_check(fields.back(), std::sqrt(5.0), 0.02);
    CHECK(rep.r0_advanced);
    CHECK(rep.r0 > grid.r.front());
    CHECK(rep.pass);
}

TEST_CASE("uniformity ratio vanishes for theta-uniform fields") {
    auto cube = Nonlinearity::power(3.0);
    RadialOptions ro;
    ro.n_r = 96;
    auto grid = PolarGrid::build(0.5, 1.0, 96, 32);
    std::vector<PolarField> fields;
    std::vector<double> prev;
    for (double k : {1e2, 1e3, 1e4}) {
        auto p = solve_annulus_truncated(cube, 0.5, 1.0, 2, 2.0, k, ro,
                                         prev.empty() ? nullptr : &prev);
        REQUIRE(p.converged);
        prev = p.u_values;
        PolarField f;
        f.grid = grid;
        f.boundary_k = k;
        f.converged = true;
        f.values = lift_radial(p, grid);
        fields.push_back(std::move(f));
    }
    const auto rep = radial_blowup_check(fields, 0.97);
    for (double v : rep.uniformity) CHECK(v == 0.0);
    CHECK(rep.strictly_increasing);
}

TEST_CASE("minimal comparison z matches a radial field") {
    // Constant inner data and a convex increasing reaction: u is radial
    // and z solves the same problem, so they agree to cross-method slack.
    auto cube = Nonlinearity::power(3.0);
    auto grid = PolarGrid::build(0.5, 1.0, 128, 32);
    std::vector<double> inner(grid.n_theta, 2.0);
    auto fields = solve_annulus_2d_continuation(cube, grid, {1e3, 1e4}, inner, {});
    REQUIRE(fields.back().converged);
    auto split = split_asymptotic(cube);
    RadialOptions ro;
    ro.n_r = grid.n_r;
    const auto rep = minimal_comparison_z(fields.back(), split, 0.52, {1e3, 1e4}, ro);
    CHECK(rep.u_dominates);
    double gap = 0.0;
    PchipInterpolant zi(rep.z.r_nodes, rep.z.u_values);
    for (int i = 0; i < grid.n_r; ++i) {
        if (grid.r[i] < rep.z.r_in || grid.r[i] > 0.95) continue;
        gap = std::max(gap, std::abs(fields.back().at(i, 0) - zi.eval(grid.r[i])) /
                                (1.0 + std::abs(zi.eval(grid.r[i]))));
    }
    CHECK(gap < 5e-3);
}

TEST_CASE("bound constants converge under refinement") {
    auto cube = Nonlinearity::power(3.0);
    double lt[3];
    for (int lev = 0; lev < 3; ++lev) {
        auto grid = PolarGrid::build(0.5, 1.0, 64 << lev, 32 << lev);
        std::vector<double> inner(grid.n_theta);
        for (int j = 0; j < grid.n_theta; ++j) {
            inner[j] = 2.0 + 0.5 * std::cos(grid.theta[j]);
        }
        auto fields = solve_annulus_2d_continuation(cube, grid, {1e3, 1e4}, inner, {});
        REQUIRE(fields.back().converged);
        lt[lev] = second_tangential_bound_check(fields.back(), 0.0, 0.02).Ltilde;
    }
    // The reported constant settles; the rate is capped near first order
    // by the node-snapped anchor ring r0.
    const double d1 = std::abs(lt[1] - lt[0]);
    const double d2 = std::abs(lt[2] - lt[1]);
    CHECK(d1 / d2 >= 1.7);
}
