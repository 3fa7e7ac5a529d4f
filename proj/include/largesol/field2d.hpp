#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "largesol/nonlinearity.hpp"
#include "largesol/radial.hpp"

namespace largesol {

/// Offset polar grid: cell-centered rings (the innermost face of a disk
/// grid sits exactly at r = 0), uniform periodic angles. Angular solves
/// are N = 2 only.
struct PolarGrid {
    double r_in = 0.0;
    double R = 1.0;
    int n_r = 256;
    int n_theta = 128;
    double grading = 1.0;

    std::vector<double> faces;
    std::vector<double> r;
    std::vector<double> theta;
    double dtheta = 0.0;

    static PolarGrid build(double r_in, double R, int n_r, int n_theta,
                           double grading = 1.0);
    bool is_disk() const { return r_in == 0.0; }
    std::size_t idx(int i_r, int i_theta) const {
        return static_cast<std::size_t>(i_r) * n_theta + i_theta;
    }
};

struct PolarField {
    PolarGrid grid;
    std::vector<double> values; // ring-major
    double boundary_k = 0.0;
    std::vector<double> inner_data; // per-theta Dirichlet data (annulus only)
    bool converged = false;
    double scaled_residual = 0.0;
    int newton_iterations = 0;

    double at(int i_r, int i_theta) const { return values[grid.idx(i_r, i_theta)]; }
};

enum class DiskInitKind { radial_lift, constant, perturbed };

struct DiskInit {
    DiskInitKind kind = DiskInitKind::radial_lift;
    double constant_value = 0.0;
    std::uint64_t seed = 1;
    double amplitude = 0.0; // relative, applied multiplicatively to the lift
    // Starting state of the internal radial continuation; steers multi-branch
    // nonlinearities onto a chosen solution branch. NaN keeps the default ramp.
    double branch_guess = std::numeric_limits<double>::quiet_NaN();

    static DiskInit radial_lift() { return {DiskInitKind::radial_lift, 0.0, 0, 0.0, {}}; }
    static DiskInit constant(double c) { return {DiskInitKind::constant, c, 0, 0.0, {}}; }
    static DiskInit perturbed(std::uint64_t seed, double amplitude) {
        return {DiskInitKind::perturbed, 0.0, seed, amplitude, {}};
    }
    DiskInit on_branch(double guess) const {
        DiskInit d = *this;
        d.branch_guess = guess;
        return d;
    }
};

struct FieldOptions {
    double newton_tol = 1e-9;
    int max_iterations = 200;
    int max_backtracks = 40;
    bool drive_to_stagnation = false; // keep iterating to the float floor
    int verbose = 0;
};

/// Truncated problem on the disk with u = k on the outer ring; Newton on
/// the 5-point polar stencil, block factorization by rings reused across
/// steps while the contraction holds.
PolarField solve_disk(const Nonlinearity& nl, const PolarGrid& grid, double k,
                      const DiskInit& init = {}, const FieldOptions& opts = {});

/// Annulus with per-theta Dirichlet inner data.
PolarField solve_annulus_2d(const Nonlinearity& nl, const PolarGrid& grid, double k,
                            const std::vector<double>& inner_data,
                            const FieldOptions& opts = {},
                            const PolarField* warm_start = nullptr);

/// Warm-started sweep over increasing outer data; returns one field per level.
std::vector<PolarField> solve_annulus_2d_continuation(
    const Nonlinearity& nl, const PolarGrid& grid,
    const std::vector<double>& k_levels, const std::vector<double>& inner_data,
    const FieldOptions& opts = {});

struct GradientField {
    PolarGrid grid;
    std::vector<double> radial;     // du/dr
    std::vector<double> tangential; // (1/r) du/dtheta
};

GradientField gradient_decomposition(const PolarField& f);

/// Max over interior nodes of |discrete residual| / (1 + |g(u)|).
double field_max_scaled_residual(const PolarField& f, const Nonlinearity& nl);

/// Lift a radial profile onto the polar grid.
std::vector<double> lift_radial(const RadialProfile& p, const PolarGrid& grid);

} // namespace largesol
