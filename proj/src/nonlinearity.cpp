#include "largesol/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "largesol/fit.hpp"
#include "largesol/quadrature.hpp"

namespace largesol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_signed(double s, double q) {
    // Odd extension keeps the family evaluable on all of R.
    if (s == 0.0) return 0.0;
    return s > 0.0 ? std::pow(s, q) : -std::pow(-s, q);
}

// g(s) = s * (ln s)^alpha for s >= e, linear continuation below.
double power_log_eval(double s, double alpha) {
    const double e = std::exp(1.0);
    if (s <= e) return s;
    const double l = std::log(s);
    return s * std::pow(l, alpha);
}

double power_log_deriv(double s, double alpha) {
    const double e = std::exp(1.0);
    if (s <= e) return 1.0;
    const double l = std::log(s);
    return std::pow(l, alpha) + alpha * std::pow(l, alpha - 1.0);
}

double poly_eval(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * s + c[i];
    return r;
}

double poly_deriv(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) r = r * s + c[i] * static_cast<double>(i);
    return r;
}

double poly_primitive(const std::vector<double>& c, double s) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
        r = r * s + c[i] / static_cast<double>(i + 1);
    }
    return r * s;
}

} // namespace

Nonlinearity Nonlinearity::power(double q) { return power(q, 0.0, 0.0); }

Nonlinearity Nonlinearity::power(double q, double a, double b) {
    if (q < 1.0) throw std::invalid_argument("power family needs q >= 1");
    if (a < 0.0 || b < a) throw std::invalid_argument("power: need 0 <= a <= b");
    return Nonlinearity(Power{q}, a, b);
}

Nonlinearity Nonlinearity::exponential() {
    return Nonlinearity(Exponential{}, 0.0, 0.0);
}

Nonlinearity Nonlinearity::power_log(double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("power_log family needs alpha >= 0");
    const double e = std::exp(1.0);
    return Nonlinearity(PowerLog{alpha}, e, e);
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs, double a, double b) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    if (b < a) throw std::invalid_argument("polynomial: need a <= b");
    return Nonlinearity(Polynomial{std::move(coeffs)}, a, b);
}

Nonlinearity Nonlinearity::cubic_minus_linear(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("cubic_minus_linear needs lambda >= 0");
    const double r = std::sqrt(lambda);
    return Nonlinearity(CubicMinusLinear{lambda}, r, r);
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> xs, std::vector<double> ys,
                                     double a, double b) {
    if (b < a) throw std::invalid_argument("tabulated: need a <= b");
    Nonlinearity nl(Tabulated{PchipInterpolant(std::move(xs), std::move(ys))}, a, b);
    return nl;
}

Nonlinearity Nonlinearity::floor_extension(const Nonlinearity& base, double M) {
    auto shared = std::make_shared<Nonlinearity>(base);
    // Frozen below M, the extension is nondecreasing and convex everywhere
    // as long as g(M) >= 0 and g is nondecreasing beyond M.
    if (base.g(M) < 0.0) {
        throw std::invalid_argument("floor_extension: g(M) must be nonnegative");
    }
    const double h = 1e-6 * std::max(1.0, std::abs(M));
    if (base.g(M + h) - base.g(M) < -1e-12 * std::max(1.0, std::abs(base.g(M)))) {
        throw std::invalid_argument("floor_extension: g must be nondecreasing at M");
    }
    return Nonlinearity(FloorExtension{shared, M}, std::min(M, base.a_convex()), M);
}

Nonlinearity Nonlinearity::zero() { return Nonlinearity(Zero{}, 0.0, 0.0); }

double Nonlinearity::g(double s) const {
    return std::visit(
        [&](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Power>) {
                return pow_signed(s, fam.q);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(s);
            } else if constexpr (std::is_same_v<T, PowerLog>) {
                return power_log_eval(s, fam.alpha);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return poly_eval(fam.coeffs, s);
            } else if constexpr (std::is_same_v<T, CubicMinusLinear>) {
                return s * s * s - fam.lambda * s;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return fam.interp.eval(s);
            } else if constexpr (std::is_same_v<T, FloorExtension>) {
                return s >= fam.M ? fam.base->g(s) : fam.base->g(fam.M);
            } else {
                return 0.0;
            }
        },
        family_);
}

double Nonlinearity::dg(double s) const {
    return std::visit(
        [&](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Power>) {
                return fam.q * std::pow(std::abs(s), fam.q - 1.0);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(s);
            } else if constexpr (std::is_same_v<T, PowerLog>) {
                return power_log_deriv(s, fam.alpha);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return poly_deriv(fam.coeffs, s);
            } else if constexpr (std::is_same_v<T, CubicMinusLinear>) {
                return 3.0 * s * s - fam.lambda;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return fam.interp.derivative(s);
            } else if constexpr (std::is_same_v<T, FloorExtension>) {
                return s >= fam.M ? fam.base->dg(s) : 0.0;
            } else {
                return 0.0;
            }
        },
        family_);
}

double Nonlinearity::G(double t) const {
    if (t < a_convex_ - 1e-14 * std::max(1.0, std::abs(a_convex_))) {
        throw std::domain_error("G(t): t below a_convex");
    }
    const double a = a_convex_;
    return std::visit(
        [&](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Power>) {
                const double p = fam.q + 1.0;
                return (std::pow(t, p) - std::pow(a, p)) / p;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(t) - std::exp(a);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return poly_primitive(fam.coeffs, t) - poly_primitive(fam.coeffs, a);
            } else if constexpr (std::is_same_v<T, CubicMinusLinear>) {
                auto prim = [&](double s) {
                    return 0.25 * s * s * s * s - 0.5 * fam.lambda * s * s;
                };
                return prim(t) - prim(a);
            } else if constexpr (std::is_same_v<T, FloorExtension>) {
                const double M = fam.M;
                const double gM = fam.base->g(M);
                if (t <= M) return gM * (t - a);
                double below = gM * (M - a);
                return below + fam.base->Htilde(t, M);
            } else if constexpr (std::is_same_v<T, Zero>) {
                return 0.0;
            } else {
                // power_log and tabulated: smooth positive integrand,
                // composite quadrature on log-subdivided panels.
                if (t == a) return 0.0;
                double total = 0.0;
                double lo = a;
                while (lo < t) {
                    double hi = std::min(t, std::max(lo * 2.0, lo + 1.0));
                    total += adaptive_simpson([&](double s) { return g(s); }, lo, hi,
                                              1e-12, 1e-300);
                    lo = hi;
                }
                return total;
            }
        },
        family_);
}

double Nonlinearity::logG(double t) const {
    if (std::holds_alternative<Exponential>(family_)) {
        // log(e^t - e^a), stable for all t > a.
        const double a = a_convex_;
        return t + std::log1p(-std::exp(a - t));
    }
    const double v = G(t);
    if (!(v > 0.0)) throw std::domain_error("logG: nonpositive primitive");
    return std::log(v);
}

double Nonlinearity::Htilde(double v, double m) const {
    if (v < m) throw std::domain_error("Htilde: v < m");
    if (v == m) return 0.0;
    return std::visit(
        [&](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Power>) {
                const double p = fam.q + 1.0;
                if (m <= 0.0) return std::pow(v, p) / p;
                // m^p * expm1(p log(v/m)) avoids cancellation near the base.
                return std::pow(m, p) * std::expm1(p * std::log1p((v - m) / m)) / p;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(m) * std::expm1(v - m);
            } else if constexpr (std::is_same_v<T, FloorExtension>) {
                const double M = fam.M;
                if (v <= M) return fam.base->g(M) * (v - m);
                if (m >= M) return fam.base->Htilde(v, M) - fam.base->Htilde(m, M);
                return fam.base->g(M) * (M - m) + fam.base->Htilde(v, M);
            } else {
                if (v - m <= 0.25 * std::max(1.0, std::abs(m))) {
                    return adaptive_simpson([&](double s) { return g(s); }, m, v,
                                            1e-12, 1e-300);
                }
                return G(v) - G(m);
            }
        },
        family_);
}

double Nonlinearity::lipschitz_window(double lo, double hi) const {
    if (hi < lo) std::swap(lo, hi);
    const int n = 257;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = lo + (hi - lo) * i / (n - 1);
        best = std::max(best, std::abs(dg(s)));
    }
    return best * 1.05;
}

std::string Nonlinearity::family_name() const {
    return std::visit(
        [](const auto& fam) -> std::string {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Power>) return "power";
            else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
            else if constexpr (std::is_same_v<T, PowerLog>) return "power_log";
            else if constexpr (std::is_same_v<T, Polynomial>) return "polynomial";
            else if constexpr (std::is_same_v<T, CubicMinusLinear>) return "cubic_minus_linear";
            else if constexpr (std::is_same_v<T, Tabulated>) return "tabulated";
            else if constexpr (std::is_same_v<T, FloorExtension>) return "floor_extension";
            else return "zero";
        },
        family_);
}

void Nonlinearity::validate(double tol, double span_factor) const {
    if (std::holds_alternative<Zero>(family_)) return;
    const double a = a_convex_;
    const double b = b_monotone_;
    const double top = std::max({a, b, 1.0}) * span_factor;
    const int n = 400;
    // Log-spaced probes from just above the thresholds.
    auto probe = [&](double lo) {
        std::vector<double> s(n);
        const double start = lo + 1e-9 * std::max(1.0, std::abs(lo));
        const double ratio = std::pow(top / std::max(start, 1e-9), 1.0 / (n - 1));
        double v = std::max(start, 1e-9);
        for (int i = 0; i < n; ++i, v *= ratio) s[i] = std::max(v, start);
        return s;
    };
    for (double s : probe(a)) {
        const double h = 1e-4 * std::max(1.0, s);
        const double dd2 = (g(s + h) - 2.0 * g(s) + g(s - h)) / (h * h);
        const double scale = std::max(1.0, std::abs(g(s)) / std::max(1.0, s * s));
        if (dd2 < -tol * scale * 1e4) {
            throw std::invalid_argument("nonlinearity not convex beyond a_convex near s=" +
                                        std::to_string(s));
        }
    }
    for (double s : probe(b)) {
        const double h = 1e-6 * std::max(1.0, s);
        if (g(s) <= 0.0 && s > b + h) {
            throw std::invalid_argument("nonlinearity not positive beyond b_monotone near s=" +
                                        std::to_string(s));
        }
        const double dd1 = (g(s + h) - g(s)) / h;
        if (dd1 < -tol * std::max(1.0, std::abs(g(s)))) {
            throw std::invalid_argument("nonlinearity not increasing beyond b_monotone near s=" +
                                        std::to_string(s));
        }
    }
}

double eval_G(const Nonlinearity& nl, double t) { return nl.G(t); }

// ---------------------------------------------------------------------------
// Keller-Osserman test
// ---------------------------------------------------------------------------

KOReport check_keller_osserman(const Nonlinearity& nl, double T_max, double margin) {
    const double a = nl.a_convex();
    const double scale = std::max(a, 1.0);
    if (T_max <= 0.0) T_max = 1e8 * scale;
    if (T_max < 100.0 * scale) {
        throw std::domain_error("check_keller_osserman: T_max below 100*max(a,1)");
    }

    const double t_lo = std::max(2.0 * scale, a + 1.0);
    // Positivity of g on the tail window.
    for (int i = 0; i <= 32; ++i) {
        const double t = t_lo * std::pow(T_max / t_lo, i / 32.0);
        if (!(nl.g(t) > 0.0)) {
            throw std::domain_error("check_keller_osserman: g nonpositive on tail window");
        }
    }

    KOReport rep;
    rep.T_max = T_max;
    rep.margin = margin;

    // Tail exponent: slope of log G^{-1/2} vs log t on the last decade.
    {
        const int n = 16;
        std::vector<double> xs(n), ys(n);
        for (int i = 0; i < n; ++i) {
            const double t = (T_max / 10.0) * std::pow(10.0, i / (n - 1.0));
            xs[i] = std::log(t);
            ys[i] = -0.5 * nl.logG(t);
        }
        const LinearFit fit = linear_fit(xs, ys);
        rep.tail_exponent = fit.slope;
        const double span = std::abs(fit.slope) * (xs.back() - xs.front()) + 1e-2;
        rep.fit_residual = fit.rms_residual / span;
    }

    // Decade integrals of G^{-1/2}; their decay against log ln t decides the
    // logarithmic borderline. I_j ~ (ln t)^{-alpha/2} per decade for
    // g = s (ln s)^alpha, so convergence of the sum means slope < -1.
    bool collapse_detected = false;
    {
        // Full decades anchored at T_max; a partial bottom window would
        // distort the per-decade comparison.
        std::vector<double> lx, ly;
        double total = 0.0;
        double hi = T_max;
        while (hi / 10.0 >= t_lo) {
            const double lo = hi / 10.0;
            const double I = gauss_legendre_15(
                [&](double x) { return std::exp(x - 0.5 * nl.logG(std::exp(x))); },
                std::log(lo), std::log(hi));
            total += I;
            if (I > 0.0 && std::isfinite(I)) {
                lx.push_back(std::log(0.5 * (std::log(lo) + std::log(hi))));
                ly.push_back(std::log(I));
            } else {
                collapse_detected = true; // integrand underflowed: super-power decay
            }
            hi = lo;
        }
        if (hi > t_lo) {
            total += gauss_legendre_15(
                [&](double x) { return std::exp(x - 0.5 * nl.logG(std::exp(x))); },
                std::log(t_lo), std::log(hi));
        }
        std::reverse(lx.begin(), lx.end());
        std::reverse(ly.begin(), ly.end());
        rep.truncated_integral = total;
        if (lx.size() >= 4) {
            // Fit the last five decades: the early ones carry the
            // below-threshold transient of g and would bias the slope.
            const std::size_t keep = std::min<std::size_t>(4, lx.size());
            const std::size_t off = lx.size() - keep;
            rep.decade_exponent =
                linear_fit(std::span(lx).subspan(off), std::span(ly).subspan(off)).slope;
        } else if (collapse_detected) {
            rep.decade_exponent = -kInf;
        } else {
            rep.verdict = KOVerdict::inconclusive;
            return rep;
        }
    }
    if (collapse_detected) rep.decade_exponent = -kInf;

    // A noisy tail fit only matters inside the discrimination band; a
    // steep clean decay is decisive regardless of curvature. The smooth
    // admissible families fit with residuals below 5e-4, while a positive
    // oscillation strong enough to matter leaves more than 0.05 even
    // after the primitive smooths it.
    if (rep.fit_residual > 0.05 && rep.tail_exponent > -3.0) {
        rep.verdict = KOVerdict::inconclusive;
        return rep;
    }
    const bool tail_ok = rep.tail_exponent < -1.0 - margin;
    const bool decade_ok = rep.decade_exponent < -1.0 - margin;
    rep.verdict = (tail_ok && decade_ok) ? KOVerdict::satisfied : KOVerdict::violated;
    return rep;
}

// ---------------------------------------------------------------------------
// Asymptotic split
// ---------------------------------------------------------------------------

SplitNonlinearity split_asymptotic(const Nonlinearity& nl) {
    return split_asymptotic(nl, nl.b_monotone());
}

SplitNonlinearity split_asymptotic(const Nonlinearity& nl, double M) {
    if (nl.g(M) < 0.0) {
        throw std::invalid_argument("split_asymptotic: g(M) < 0");
    }
    const double h = 1e-6 * std::max(1.0, std::abs(M));
    if (nl.g(M + h) - nl.g(M) < -1e-10 * std::max(1.0, std::abs(nl.g(M)))) {
        throw std::invalid_argument("split_asymptotic: g decreasing at M");
    }
    SplitNonlinearity split;
    split.base = nl;
    split.M = M;
    split.g_inf = Nonlinearity::floor_extension(nl, M);
    return split;
}

double SplitNonlinearity::k0_bound(double lo, double hi) const {
    double top = std::min(hi, M);
    if (top <= lo) return 0.0;
    const int n = 4096;
    double best = 0.0;
    double arg = lo;
    for (int i = 0; i <= n; ++i) {
        const double s = lo + (top - lo) * i / n;
        const double v = std::abs(g_tilde(s));
        if (v > best) {
            best = v;
            arg = s;
        }
    }
    // Parabolic refinement around the sampled maximum.
    double h = (top - lo) / n;
    for (int it = 0; it < 40 && h > 1e-14 * std::max(1.0, top); ++it) {
        const double l = std::abs(g_tilde(std::max(lo, arg - h)));
        const double r = std::abs(g_tilde(std::min(top, arg + h)));
        if (l > best && l >= r) {
            arg = std::max(lo, arg - h);
            best = l;
        } else if (r > best) {
            arg = std::min(top, arg + h);
            best = r;
        } else {
            h *= 0.5;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Boundedness of g/sqrt(G) * int_s^inf (2G)^{-1/2}
// ---------------------------------------------------------------------------

namespace {

// Tail integral int_s^inf (2 G)^{-1/2} d xi in the scaled form
// (2 G(s))^{-1/2} * int exp(-(logG(xi) - logG(s))/2) d xi, stable for
// fast-growing primitives.
double bu_tail_integral(const Nonlinearity& nl, double s) {
    const double logGs = nl.logG(s);
    double total = 0.0;
    double lo = s;
    const double T = 1e6 * s;
    while (lo < T) {
        const double hi = std::min(T, lo * 1.6);
        const double piece = gauss_legendre_15(
            [&](double xi) { return std::exp(-0.5 * (nl.logG(xi) - logGs)); }, lo, hi);
        total += piece;
        lo = hi;
        if (piece < 1e-16 * total) break;
    }
    if (lo >= T) {
        // Local model of the primitive at the truncation point decides the
        // remainder: power-like G ~ c t^p, or log-corrected t^2 (ln t)^alpha.
        const double l1 = nl.logG(T * 0.98);
        const double l2 = nl.logG(T * 1.02);
        const double p = (l2 - l1) / (std::log(T * 1.02) - std::log(T * 0.98));
        const double w = std::exp(-0.5 * (nl.logG(T) - logGs));
        if (p > 2.5) {
            total += w * T / (0.5 * p - 1.0);
        } else {
            const double alpha_est = (p - 2.0) * std::log(T);
            if (alpha_est > 2.2) {
                total += w * T * 2.0 * std::log(T) / (alpha_est - 2.0);
            } else {
                return -1.0; // remainder not integrable by either model
            }
        }
    }
    return total * std::exp(-0.5 * logGs) / std::sqrt(2.0);
}

} // namespace

BoundednessReport check_bu_condition(const Nonlinearity& nl, double s_max) {
    const double a = nl.a_convex();
    const double lo = std::max(2.0 * std::max(a, 1.0), a + 1.0);
    if (s_max < 10.0 * lo) {
        throw std::domain_error("check_bu_condition: s_max too small");
    }
    BoundednessReport rep;
    const int per_decade = 8;
    const int n = static_cast<int>(std::ceil(per_decade * std::log10(s_max / lo))) + 1;
    for (int i = 0; i < n; ++i) {
        const double s = lo * std::pow(s_max / lo, i / (n - 1.0));
        const double tail = bu_tail_integral(nl, s);
        if (tail < 0.0) {
            rep.verdict = BoundednessVerdict::inconclusive;
            return rep;
        }
        const double val = nl.g(s) * std::exp(-0.5 * nl.logG(s)) * tail;
        rep.sample_s.push_back(s);
        rep.sample_value.push_back(val);
        rep.sampled_sup = std::max(rep.sampled_sup, val);
    }
    // Trend over the last decade.
    const double last = rep.sample_value.back();
    double ref = last;
    for (std::size_t i = 0; i < rep.sample_s.size(); ++i) {
        if (rep.sample_s[i] >= s_max / 10.0) {
            ref = rep.sample_value[i];
            break;
        }
    }
    rep.growth_ratio_last_decade = last / ref;
    bool increasing_tail = true;
    const std::size_t half = rep.sample_value.size() / 2;
    for (std::size_t i = half; i + 1 < rep.sample_value.size(); ++i) {
        if (rep.sample_value[i + 1] < rep.sample_value[i]) {
            increasing_tail = false;
            break;
        }
    }
    if (rep.growth_ratio_last_decade > 1.05 && increasing_tail) {
        rep.verdict = BoundednessVerdict::unbounded;
    } else if (rep.growth_ratio_last_decade < 1.02) {
        rep.verdict = BoundednessVerdict::bounded;
    } else {
        rep.verdict = BoundednessVerdict::inconclusive;
    }
    return rep;
}

} // namespace largesol
