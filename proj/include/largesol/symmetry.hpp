#pragma once

#include <cstdint>
#include <vector>

#include "largesol/field2d.hpp"

namespace largesol {

/// Disk field resampled on a square Cartesian grid by bicubic
/// interpolation in (r, theta), with cross-pole continuation through the
/// origin. Nodes outside 0.98R are masked: interpolation across the
/// imposed-k ring is unreliable and the checks exclude that band.
struct CartesianField {
    int n = 0;          // nodes per side
    double x0 = 0.0;    // coordinate of index 0 (= -R)
    double dx = 0.0;
    double R = 0.0;
    std::vector<double> u;
    std::vector<std::uint8_t> valid;

    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * n + ix;
    }
    double x(int i) const { return x0 + i * dx; }
};

CartesianField resample_cartesian(const PolarField& f, int nodes_per_side = 0);

struct MovingPlaneViolation {
    double lambda;
    int ix;
    int iy;
    double deficit;
};

struct Dx1Violation {
    int ix;
    int iy;
    double value;
};

struct SymmetryReport {
    // Angular variation part.
    std::vector<double> ring_r;
    std::vector<double> ring_variation;
    double sup_variation = 0.0;

    // Moving-plane part.
    std::vector<double> lambda_used; // snapped to half-grid so reflections are exact
    std::vector<MovingPlaneViolation> moving_plane_violations;
    std::vector<Dx1Violation> dx1_violations;
    double tol_refl = 0.0;
    bool moving_plane_pass = true;

    // Monotonicity part.
    std::vector<std::pair<int, double>> monotonicity_violations;
    bool monotonicity_pass = true;
};

/// Per-ring range of u over theta on r <= 0.98R.
SymmetryReport angular_variation(const PolarField& f);

/// Reflection scan across the planes {x1 = lambda} on the resampled grid;
/// inequality checked with slack tol_refl, violations recorded with their
/// positive deficits. Lambdas default to 32 uniform values in (0.02R, 0.9R).
SymmetryReport moving_plane_check(const PolarField& f, double tol_refl,
                                  std::vector<double> lambdas = {});

/// Scan primitive on an already-resampled field; the reflection uses exact
/// grid symmetry (lambdas snapped to half-grid multiples).
void moving_plane_scan(const CartesianField& cart, double tol_refl,
                       const std::vector<double>& lambdas, SymmetryReport& rep);

enum class MonotonicityRegion { full_ball_minus_origin, outer_half_annulus };

SymmetryReport monotonicity_check(const RadialProfile& p, MonotonicityRegion region);
SymmetryReport monotonicity_check(const PolarField& f, MonotonicityRegion region);

struct GnnReport {
    std::vector<double> ring_r;
    std::vector<double> rho; // max_theta |grad_tau u| / min_theta dr u per ring
    bool radial_positive = true;
    bool decreasing_tail = false;
    double rho_at_098 = 0.0;
    bool pass = false;
};

/// Ratio diagnostic for the gradient hypothesis: rho must decay toward the
/// blow-up boundary and be small at 0.98R.
GnnReport gnn_hypothesis_check(const PolarField& f);

} // namespace largesol
