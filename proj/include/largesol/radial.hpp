#pragma once

#include <limits>
#include <vector>

#include "largesol/nonlinearity.hpp"
#include "largesol/transform.hpp"

namespace largesol {

enum class RadialMethod { continuation, w_transform, annulus };

/// A 1D radial solution on a cell-centered grid. For the ball the inner
/// face sits exactly at r = 0, so the symmetry condition u'(0) = 0 is the
/// vanishing of the r^{N-1}-weighted flux and no ghost is needed there.
struct RadialProfile {
    double R = 1.0;
    int N = 3;
    double r_in = 0.0; // 0 for the ball
    std::vector<double> r_nodes;
    std::vector<double> u_values;
    std::vector<double> du_values;
    RadialMethod method = RadialMethod::continuation;
    double k_level = 0.0;
    bool converged = false;
    double scaled_residual = 0.0;
    int newton_iterations = 0;

    // Grid faces and inner datum, kept so residual diagnostics can be
    // recomputed on a finished profile.
    std::vector<double> faces;
    double inner_value = std::numeric_limits<double>::quiet_NaN();
};

struct RadialOptions {
    int n_r = 2048;
    double grading = 1.0; // 1 = uniform; gamma > 1 clusters cells toward R
    double newton_tol = 1e-10;
    int max_iterations = 200;
    int max_backtracks = 40;
};

/// Damped-Newton solve of u'' + (N-1)/r u' = g(u), u'(0) = 0, u(R) = k.
RadialProfile solve_truncated(const Nonlinearity& nl, double R, int N, double k,
                              const RadialOptions& opts = {},
                              const std::vector<double>* warm_start = nullptr);

/// Fixed outer datum on the annulus r_in < r < R with u(r_in) = inner_value.
RadialProfile solve_annulus_truncated(const Nonlinearity& nl, double r_in, double R,
                                      int N, double inner_value, double k,
                                      const RadialOptions& opts = {},
                                      const std::vector<double>* warm_start = nullptr);

enum class ContinuationStatus { converged, diverging, inconclusive, solver_failure };

struct ContinuationResult {
    RadialProfile profile;
    std::vector<double> k_levels;
    std::vector<double> interior_change; // relative change on r <= 0.9R per level
    ContinuationStatus status = ContinuationStatus::inconclusive;
    bool monotone_in_k = true;
};

std::vector<double> default_continuation_schedule(double k_max = 1e8);

/// Drives k along the schedule with warm starts; stops when the interior
/// stabilizes. The limit approximates the minimal large solution.
ContinuationResult solve_large_continuation(const Nonlinearity& nl, double R, int N,
                                            std::vector<double> k_schedule = {},
                                            const RadialOptions& opts = {},
                                            double stop_tol = 1e-6);

/// Same scheme on the annulus with a Dirichlet inner ring.
ContinuationResult solve_annulus_radial(const Nonlinearity& nl, double r_in, double R,
                                        int N, double inner_value,
                                        std::vector<double> k_schedule = {},
                                        const RadialOptions& opts = {},
                                        double stop_tol = 1e-6);

/// Base-point policy for the transform solve. The transformed equation is
/// invariant under the choice of base m <= min u, so the default pins the
/// base at b_monotone where the coefficient b(w) is provably monotone;
/// sharp_min_u iterates the base up to the discovered minimum instead.
enum class WBasePolicy { pinned, sharp_min_u };

struct WTransformOptions {
    RadialOptions radial{};
    double m_init = std::numeric_limits<double>::quiet_NaN(); // NaN -> b_monotone
    WBasePolicy base_policy = WBasePolicy::pinned;
    int max_outer = 30;
};

struct WTransformResult {
    RadialProfile profile; // u = F^{-1}(w), method = w_transform
    std::vector<double> w_values;
    std::vector<double> dw_values;
    int w_offset = 0;        // first profile node covered by w_values
    double w_boundary = 0.0; // Dirichlet value imposed at R, exactly 0
    double m_base = 0.0;
    double min_u = 0.0; // extrapolated center (or inner-match) value
    bool matched_fallback = false;
    double fallback_r_star = 0.0;
    int outer_iterations = 0;
};

/// Solves the bounded problem w'' + (N-1)/r w' = b(w)(w'^2 - 1), w(R) = 0,
/// and recovers u = F^{-1}(w). Falls back to a matched annulus solve with
/// continuation data inside when the solution dips below the base.
WTransformResult solve_w_transform(const Nonlinearity& nl, double R, int N,
                                   const WTransformOptions& opts = {});

struct BracketResult {
    RadialProfile maximal;
    RadialProfile minimal;
    double gap = 0.0; // sup over r <= 0.9R of |max-min|/(1+|min|)
    bool ordered = true;
    std::vector<double> shrink_levels;
};

/// Large solutions on shrinking balls B_{R'} decrease to the maximal
/// solution; the gap against the minimal (continuation) solution brackets
/// the uniqueness claim.
BracketResult maximal_solution_bracket(const Nonlinearity& nl, double R, int N,
                                       std::vector<double> shrink = {},
                                       const RadialOptions& opts = {});

struct BlowupRateFit {
    double exponent = 0.0;
    double constant = 0.0;
    double residual = 0.0;
    bool poor_fit = false;
};

/// Least-squares fit of log u against log(R - r) on [window_lo, window_hi].
BlowupRateFit blowup_rate_fit(const RadialProfile& p, double window_lo,
                              double window_hi);

/// Max over interior nodes of |discrete residual| / (1 + |g(u)|).
double max_scaled_residual(const RadialProfile& p, const Nonlinearity& nl);

/// Max over nodes with u >= m of u' / sqrt(2 Htilde(u)); the energy bound
/// says this stays below 1 up to grid tolerance.
double energy_inequality_slack(const RadialProfile& p, const Nonlinearity& nl,
                               double m);

/// Monotone-cubic evaluation of a profile at radius r.
double interp_profile(const RadialProfile& p, double r);

} // namespace largesol
