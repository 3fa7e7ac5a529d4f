#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "largesol/interp.hpp"

namespace largesol {

/// Verdict of the Keller-Osserman tail test.
enum class KOVerdict { satisfied, violated, inconclusive };

/// Evidence produced by check_keller_osserman. The tail exponent is the
/// fitted slope of log G^{-1/2} against log t on the last decade before
/// T_max; the decade exponent is the fitted slope of the per-decade
/// integrals of G^{-1/2} against log ln t, which separates the
/// logarithmic borderline families the raw tail slope cannot.
struct KOReport {
    KOVerdict verdict = KOVerdict::inconclusive;
    double truncated_integral = 0.0;
    double tail_exponent = 0.0;
    double decade_exponent = 0.0;
    double fit_residual = 0.0;
    double T_max = 0.0;
    double margin = 0.0;
};

enum class BoundednessVerdict { bounded, unbounded, inconclusive };

/// Result of the boundedness test for g(s)/sqrt(G(s)) * int_s^inf (2G)^{-1/2}.
struct BoundednessReport {
    BoundednessVerdict verdict = BoundednessVerdict::inconclusive;
    double sampled_sup = 0.0;
    double growth_ratio_last_decade = 1.0;
    std::vector<double> sample_s;
    std::vector<double> sample_value;
};

/// The reaction term g of -Delta u + g(u) = 0, with its structural
/// thresholds: g is declared positive and convex on [a_convex, inf) and
/// positive increasing on [b_monotone, inf).
class Nonlinearity {
public:
    struct Power {
        double q;
    };
    struct Exponential {};
    struct PowerLog {
        double alpha;
    };
    struct Polynomial {
        std::vector<double> coeffs; // c0 + c1 s + c2 s^2 + ...
    };
    struct CubicMinusLinear {
        double lambda;
    };
    struct Tabulated {
        PchipInterpolant interp;
    };
    /// g frozen at its value at M below M; equals the base term above.
    /// This is the convex nondecreasing extension used for asymptotic splits.
    struct FloorExtension {
        std::shared_ptr<const Nonlinearity> base;
        double M;
    };
    struct Zero {};

    using Family = std::variant<Power, Exponential, PowerLog, Polynomial,
                                CubicMinusLinear, Tabulated, FloorExtension, Zero>;

    Nonlinearity() : family_(Zero{}) {}

    static Nonlinearity power(double q);
    static Nonlinearity power(double q, double a, double b);
    static Nonlinearity exponential();
    static Nonlinearity power_log(double alpha);
    static Nonlinearity polynomial(std::vector<double> coeffs, double a, double b);
    static Nonlinearity cubic_minus_linear(double lambda);
    static Nonlinearity tabulated(std::vector<double> xs, std::vector<double> ys,
                                  double a, double b);
    static Nonlinearity floor_extension(const Nonlinearity& base, double M);
    static Nonlinearity zero();

    double g(double s) const;
    double dg(double s) const;

    /// Primitive G(t) = int_{a_convex}^t g(s) ds. Closed form where the
    /// family admits one, adaptive quadrature (rel. 1e-10) otherwise.
    /// Throws std::domain_error for t < a_convex.
    double G(double t) const;

    /// log G(t), stable for families whose primitive overflows (exponential).
    double logG(double t) const;

    /// Stable int_m^v g(s) ds for v >= m >= a_convex.
    double Htilde(double v, double m) const;

    /// Estimated Lipschitz constant of g on [lo, hi].
    double lipschitz_window(double lo, double hi) const;

    double a_convex() const { return a_convex_; }
    double b_monotone() const { return b_monotone_; }
    const Family& family() const { return family_; }
    std::string family_name() const;

    /// Numerically checks the declared thresholds: convexity beyond a_convex,
    /// positivity and monotonicity beyond b_monotone (divided-difference
    /// probes with relative slack tol). Throws std::invalid_argument on failure.
    void validate(double tol = 1e-8, double span_factor = 1e4) const;

private:
    Nonlinearity(Family f, double a, double b)
        : family_(std::move(f)), a_convex_(a), b_monotone_(b) {}

    Family family_;
    double a_convex_ = 0.0;
    double b_monotone_ = 0.0;
};

/// Asymptotic splitting g = g_inf + g_tilde with g_inf convex nondecreasing
/// everywhere and g_tilde supported below the threshold M.
struct SplitNonlinearity {
    Nonlinearity base;
    Nonlinearity g_inf;
    double M = 0.0;

    double g_tilde(double s) const { return base.g(s) - g_inf.g(s); }

    /// sup |g_tilde| over [lo, min(hi, M)], sampled with local refinement.
    double k0_bound(double lo, double hi) const;
};

/// int_{a}^{t} g, with the precondition t >= a_convex.
double eval_G(const Nonlinearity& nl, double t);

/// Keller-Osserman tail test; margin guards the borderline decay rate.
/// T_max defaults to 1e8 * max(a_convex, 1).
KOReport check_keller_osserman(const Nonlinearity& nl, double T_max = 0.0,
                               double margin = 0.05);

/// Builds the constant-extension split at M = b_monotone.
SplitNonlinearity split_asymptotic(const Nonlinearity& nl);
SplitNonlinearity split_asymptotic(const Nonlinearity& nl, double M);

/// Samples s -> (g/sqrt(G)) * int_s^inf (2 G)^{-1/2} up to s_max and
/// classifies the trend (bounded / unbounded / inconclusive).
BoundednessReport check_bu_condition(const Nonlinearity& nl, double s_max);

} // namespace largesol
