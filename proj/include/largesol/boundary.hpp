#pragma once

#include <vector>

#include "largesol/field2d.hpp"
#include "largesol/nonlinearity.hpp"
#include "largesol/radial.hpp"

namespace largesol {

/// The comparison barrier phi with -Delta phi = 1, phi(R) = 0, and the
/// harmonic cutoff potential P with P(r0) = 1, P(R) = 0.
struct Barrier {
    double R = 1.0;
    int N = 2;
    double r0 = 0.5;

    double phi(double r) const { return (R * R - r * r) / (2.0 * N); }

    double P(double r) const;

    /// Interior max of |Delta_h P| and |Delta_h phi + 1| on a radial probe
    /// grid with spacing h; both are O(h^2).
    struct HarmonicityCheck {
        double max_P_residual;
        double max_phi_residual;
    };
    HarmonicityCheck discrete_harmonicity(int n_probe = 512) const;
};

struct SandwichReport {
    double K0 = 0.0;
    double tol = 0.0;
    double max_upper_deficit = 0.0; // positive when u exceeds U_R + K0 phi + tol
    double max_lower_deficit = 0.0;
    bool pass = false;
};

/// Checks U_R - K0 phi - tol <= u <= U_R + K0 phi + tol nodewise, with U_R
/// the radial solution for g_inf at the same truncation level and K0 the
/// sup of |g_tilde| over the field range.
SandwichReport sandwich_check(const PolarField& f, const RadialProfile& U_R,
                              const SplitNonlinearity& split, double tol_rel = 0.02);

struct TangentialBoundReport {
    double r0 = 0.0;
    double Lstar = 0.0;       // max_theta |u_theta| on the r0 ring
    double C_linear = 0.0;    // fitted constant of |u_theta| <= C (R - r)
    double max_slack = 0.0;   // most negative margin, positive = violation
    int violations = 0;
    bool r0_advanced = false; // r0 moved outward to reach u >= M
    bool pass = false;
};

/// |u_theta(r, theta)| <= Lstar * P(r) * (1 + tol) for r >= r0.
TangentialBoundReport tangential_bound_check(const PolarField& f, double M,
                                             double tol = 0.02);

struct SecondTangentialReport {
    double r0 = 0.0;
    double Ltilde = 0.0; // max_theta u_thetatheta on the r0 ring
    int violations = 0;  // one-sided by default
    int two_sided_violations = 0;
    bool pass = false;
};

/// One-sided bound u_thetatheta <= Ltilde * P(r) * (1 + tol) for r >= r0.
/// two_sided additionally scans |u_thetatheta| <= ... which the estimate
/// does not grant; it exists as a negative control for the checker itself.
SecondTangentialReport second_tangential_bound_check(const PolarField& f, double M,
                                                     double tol = 0.02,
                                                     bool two_sided = false);

struct RadialBlowupReport {
    std::vector<double> k_levels;
    std::vector<double> min_dr;     // min over theta of du/dr at the probe ring
    std::vector<double> uniformity; // (max-min)/min of du/dr at the probe ring
    bool strictly_increasing = false;
    bool uniformity_decreasing = false;
    bool pass = false;
};

/// Trend of the radial derivative at the probe ring r = probe_frac * R
/// across continuation levels.
RadialBlowupReport radial_blowup_check(const std::vector<PolarField>& fields,
                                       double probe_frac = 0.97);

struct MinimalComparisonReport {
    RadialProfile z;
    bool u_dominates = true;
    double max_deficit = 0.0;
    std::vector<double> ginf_integral; // int_{r0}^{R-} s^{N-1} g_inf(z) per level
};

/// Minimal annulus solution z for g_inf with inner datum min_theta u(r0);
/// verifies u >= z on r >= r0 and reports the divergence of the g_inf
/// integral along the continuation levels.
MinimalComparisonReport minimal_comparison_z(const PolarField& f,
                                             const SplitNonlinearity& split,
                                             double r0,
                                             const std::vector<double>& k_levels,
                                             const RadialOptions& opts = {});

} // namespace largesol
