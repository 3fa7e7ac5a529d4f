#include <doctest.h>

#include <cmath>
#include <random>

#include "largesol/nonlinearity.hpp"
#include "oracles.hpp"

using namespace largesol;

TEST_CASE("primitive closed forms") {
    auto s2 = Nonlinearity::power(2.0, 1.0, 1.0);
    CHECK(eval_G(s2, 2.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    CHECK(eval_G(s2, 1.0) == doctest::Approx(0.0));

    auto es = Nonlinearity::exponential();
    CHECK(eval_G(es, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));

    CHECK_THROWS_AS(eval_G(s2, 0.5), std::domain_error);
}

TEST_CASE("primitive quadrature path matches midpoint oracle") {
    auto pl = Nonlinearity::power_log(3.0);
    const double a = pl.a_convex();
    const double t = 50.0;
    const double oracle = oracles::midpoint_integral(
        [&](double s) { return s * std::pow(std::log(s), 3.0); }, a, t);
    CHECK(pl.G(t) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("keller-osserman truth table") {
    auto verdict = [](const Nonlinearity& nl) {
        return check_keller_osserman(nl).verdict;
    };
    CHECK(verdict(Nonlinearity::power(1.5)) == KOVerdict::satisfied);
    CHECK(verdict(Nonlinearity::power(2.0)) == KOVerdict::satisfied);
    CHECK(verdict(Nonlinearity::power(3.0)) == KOVerdict::satisfied);
    CHECK(verdict(Nonlinearity::exponential()) == KOVerdict::satisfied);
    CHECK(verdict(Nonlinearity::power_log(3.0)) == KOVerdict::satisfied);
    CHECK(verdict(Nonlinearity::power(1.0)) == KOVerdict::violated);
    CHECK(verdict(Nonlinearity::power_log(1.0)) == KOVerdict::violated);
    CHECK(verdict(Nonlinearity::power_log(2.0)) == KOVerdict::violated);
}

TEST_CASE("keller-osserman report evidence") {
    const KOReport cubic = check_keller_osserman(Nonlinearity::power(3.0));
    CHECK(cubic.tail_exponent == doctest::Approx(-2.0).epsilon(1e-3));
    const KOReport linear = check_keller_osserman(Nonlinearity::power(1.0));
    CHECK(linear.tail_exponent == doctest::Approx(-1.0).epsilon(1e-3));

    CHECK_THROWS_AS(check_keller_osserman(Nonlinearity::power(3.0), 50.0),
                    std::domain_error);
    // Sign-changing tail is rejected outright.
    CHECK_THROWS_AS(
        check_keller_osserman(Nonlinearity::polynomial({0.0, -1.0}, 0.0, 0.0)),
        std::domain_error);
}

TEST_CASE("asymptotic split: constant extension") {
    auto cube = Nonlinearity::power(3.0);
    auto sp = split_asymptotic(cube, 1.0);
    CHECK(sp.g_inf.g(0.5) == doctest::Approx(1.0));
    CHECK(sp.g_inf.g(2.0) == doctest::Approx(8.0));
    CHECK(sp.g_tilde(0.5) == doctest::Approx(-0.875));
    CHECK(sp.g_tilde(2.0) == doctest::Approx(0.0));

    // M = 0 leaves the family untouched on [0, inf); below the threshold
    // the convex extension freezes at g(0) = 0.
    auto sp0 = split_asymptotic(cube, 0.0);
    for (double s : {0.0, 0.2, 1.0, 7.3}) {
        CHECK(sp0.g_tilde(s) == doctest::Approx(0.0).epsilon(1e-14));
    }
    CHECK(sp0.g_inf.g(-1.0) == doctest::Approx(0.0));

    // g(sqrt(5)) = 0 so the constant extension vanishes below M.
    auto cm = Nonlinearity::cubic_minus_linear(5.0);
    auto spc = split_asymptotic(cm);
    CHECK(spc.M == doctest::Approx(std::sqrt(5.0)));
    CHECK(spc.g_inf.g(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spc.g_tilde(1.0) == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(spc.g_tilde(3.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spc.k0_bound(0.0, spc.M) == doctest::Approx(10.0 * std::sqrt(5.0 / 3.0) / 3.0)
                                          .epsilon(1e-6));
}

TEST_CASE("split exactness and support properties") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-3.0, 40.0);
    for (auto& nl : {Nonlinearity::power(3.0), Nonlinearity::cubic_minus_linear(5.0),
                     Nonlinearity::exponential()}) {
        auto sp = split_asymptotic(nl);
        for (int i = 0; i < 400; ++i) {
            const double s = unif(rng);
            const double total = sp.g_inf.g(s) + sp.g_tilde(s);
            CHECK(std::abs(total - nl.g(s)) <= 1e-12 * (1.0 + std::abs(nl.g(s))));
            if (s >= sp.M) CHECK(sp.g_tilde(s) == 0.0);
        }
        // Divided-difference convexity and monotonicity of g_inf everywhere.
        for (int i = 0; i < 200; ++i) {
            const double s = unif(rng);
            const double h = 1e-3 * (1.0 + std::abs(s));
            const double dd1 = sp.g_inf.g(s + h) - sp.g_inf.g(s);
            const double dd2 =
                sp.g_inf.g(s + h) - 2.0 * sp.g_inf.g(s) + sp.g_inf.g(s - h);
            CHECK(dd1 >= -1e-10 * (1.0 + std::abs(sp.g_inf.g(s))));
            CHECK(dd2 >= -1e-8 * (1.0 + std::abs(sp.g_inf.g(s))));
        }
    }
}

TEST_CASE("split rejects a decreasing threshold point") {
    // At M = 1 the cubic-minus-linear term is negative.
    CHECK_THROWS_AS(split_asymptotic(Nonlinearity::cubic_minus_linear(5.0), 1.0),
                    std::invalid_argument);
}

TEST_CASE("boundedness diagnostic for g/sqrt(G) * tail integral") {
    auto q3 = check_bu_condition(Nonlinearity::power(3.0), 1e6);
    CHECK(q3.verdict == BoundednessVerdict::bounded);
    // Powers plateau at sqrt(2)(q+1)/(q-1).
    CHECK(q3.sample_value.back() ==
          doctest::Approx(std::sqrt(2.0) * 4.0 / 2.0).epsilon(2e-2));

    auto es = check_bu_condition(Nonlinearity::exponential(), 500.0);
    CHECK(es.verdict == BoundednessVerdict::bounded);
    CHECK(es.sample_value.back() == doctest::Approx(std::sqrt(2.0)).epsilon(2e-2));

    auto pl = check_bu_condition(Nonlinearity::power_log(3.0), 1e7);
    CHECK(pl.verdict == BoundednessVerdict::unbounded);
}

TEST_CASE("validate flags a threshold lie") {
    // Claiming convexity from 0 for a family that is concave below e.
    auto bad = Nonlinearity::polynomial({0.0, 0.0, 0.0, -1.0}, 0.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(Nonlinearity::power(3.0).validate());
    CHECK_NOTHROW(Nonlinearity::cubic_minus_linear(5.0).validate());
    CHECK_NOTHROW(Nonlinearity::exponential().validate());
}

TEST_CASE("tabulated family follows its samples") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 200; ++i) {
        const double x = -2.0 + 12.0 * i / 200.0;
        xs.push_back(x);
        ys.push_back(x * x * x);
    }
    auto tab = Nonlinearity::tabulated(xs, ys, 0.0, 0.0);
    CHECK(tab.g(2.0) == doctest::Approx(8.0).epsilon(2e-3));
    CHECK(tab.G(3.0) == doctest::Approx(81.0 / 4.0).epsilon(5e-3));
}

TEST_CASE("lipschitz window bounds the derivative") {
    auto cube = Nonlinearity::power(3.0);
    const double L = cube.lipschitz_window(0.0, 10.0);
    CHECK(L >= 300.0);
    CHECK(L <= 330.0);
}

TEST_CASE("oscillatory tail yields an inconclusive tail verdict") {
    // g = s^2 (1.05 + sin(3 ln s)): positive, but the log-log tail wobbles
    // too much for a trustworthy slope.
    std::vector<double> xs, ys;
    for (int i = 0; i <= 4000; ++i) {
        const double s = std::pow(10.0, -0.5 + 6.5 * i / 4000.0);
        xs.push_back(s);
        ys.push_back(s * s * (1.05 + std::sin(3.0 * std::log(s))));
    }
    auto osc = Nonlinearity::tabulated(xs, ys, 1.0, 1.0);
    const KOReport rep = check_keller_osserman(osc, 1e5);
    CHECK(rep.verdict == KOVerdict::inconclusive);
    CHECK(rep.fit_residual > 0.05);
}
