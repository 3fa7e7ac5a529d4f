#include "largesol/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "largesol/interp.hpp"

namespace largesol {

double Barrier::P(double r) const {
    if (N == 2) {
        return (std::log(r) - std::log(R)) / (std::log(r0) - std::log(R));
    }
    const double e = 2.0 - N;
    return (std::pow(r, e) - std::pow(R, e)) / (std::pow(r0, e) - std::pow(R, e));
}

Barrier::HarmonicityCheck Barrier::discrete_harmonicity(int n_probe) const {
    const double lo = r0;
    const double h = (R - lo) / (n_probe + 1);
    double worst_P = 0.0, worst_phi = 0.0;
    for (int i = 1; i <= n_probe; ++i) {
        const double r = lo + i * h;
        const double lap_P = (P(r + h) - 2.0 * P(r) + P(r - h)) / (h * h) +
                             (N - 1) / r * (P(r + h) - P(r - h)) / (2.0 * h);
        const double lap_phi = (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h) +
                               (N - 1) / r * (phi(r + h) - phi(r - h)) / (2.0 * h);
        worst_P = std::max(worst_P, std::abs(lap_P));
        worst_phi = std::max(worst_phi, std::abs(lap_phi + 1.0));
    }
    return {worst_P, worst_phi};
}

SandwichReport sandwich_check(const PolarField& f, const RadialProfile& U_R,
                              const SplitNonlinearity& split, double tol_rel) {
    if (std::abs(f.boundary_k - U_R.k_level) >
        1e-9 * (1.0 + std::abs(f.boundary_k))) {
        throw std::invalid_argument("sandwich_check: mismatched k-levels");
    }
    SandwichReport rep;
    double umin = f.values[0];
    for (double v : f.values) umin = std::min(umin, v);
    rep.K0 = split.k0_bound(umin, split.M);
    rep.tol = tol_rel;
    PchipInterpolant U(U_R.r_nodes, U_R.u_values);
    const PolarGrid& g = f.grid;
    Barrier bar{g.R, 2, std::max(g.r_in, 1e-3 * g.R)};
    for (int i = 0; i < g.n_r; ++i) {
        const double Ur = U.eval(g.r[i]);
        const double width = rep.K0 * bar.phi(g.r[i]);
        const double tol = tol_rel * (1.0 + std::abs(Ur));
        for (int j = 0; j < g.n_theta; ++j) {
            const double u = f.at(i, j);
            rep.max_upper_deficit = std::max(rep.max_upper_deficit, u - (Ur + width + tol));
            rep.max_lower_deficit = std::max(rep.max_lower_deficit, (Ur - width - tol) - u);
        }
    }
    rep.pass = rep.max_upper_deficit <= 0.0 && rep.max_lower_deficit <= 0.0;
    return rep;
}

namespace {

// Smallest ring with min_theta u >= M; reports whether it moved outward.
int locate_r0(const PolarField& f, double M, bool& advanced) {
    const PolarGrid& g = f.grid;
    advanced = false;
    for (int i = 0; i < g.n_r; ++i) {
        double lo = f.at(i, 0);
        for (int j = 1; j < g.n_theta; ++j) lo = std::min(lo, f.at(i, j));
        if (lo >= M) {
            advanced = i > 0;
            return i;
        }
    }
    return -1;
}

} // namespace

TangentialBoundReport tangential_bound_check(const PolarField& f, double M, double tol) {
    const PolarGrid& g = f.grid;
    TangentialBoundReport rep;
    bool advanced = false;
    const int i0 = locate_r0(f, M, advanced);
    if (i0 < 0) throw std::runtime_error("tangential_bound_check: u never reaches M");
    rep.r0_advanced = advanced;
    rep.r0 = g.r[i0];
    Barrier bar{g.R, 2, rep.r0};

    auto utheta = [&](int i, int j) {
        return (f.at(i, (j + 1) % g.n_theta) - f.at(i, (j + g.n_theta - 1) % g.n_theta)) /
               (2.0 * g.dtheta);
    };
    for (int j = 0; j < g.n_theta; ++j) {
        rep.Lstar = std::max(rep.Lstar, std::abs(utheta(i0, j)));
    }
    double worst = 0.0;
    for (int i = i0; i < g.n_r; ++i) {
        const double bound = rep.Lstar * bar.P(g.r[i]) * (1.0 + tol) +
                             1e-12 * (1.0 + rep.Lstar);
        for (int j = 0; j < g.n_theta; ++j) {
            const double slack = std::abs(utheta(i, j)) - bound;
            worst = std::max(worst, slack);
            if (slack > 0.0) ++rep.violations;
        }
    }
    rep.max_slack = worst;
    // Linear fit of the last 10% band: |u_theta| <= C (R - r).
    double C = 0.0;
    for (int i = i0; i < g.n_r; ++i) {
        if (g.r[i] < 0.9 * g.R) continue;
        for (int j = 0; j < g.n_theta; ++j) {
            C = std::max(C, std::abs(utheta(i, j)) / (g.R - g.r[i]));
        }
    }
    rep.C_linear = C;
    rep.pass = rep.violations == 0;
    return rep;
}

SecondTangentialReport second_tangential_bound_check(const PolarField& f, double M,
                                                     double tol, bool two_sided) {
    const PolarGrid& g = f.grid;
    SecondTangentialReport rep;
    bool advanced = false;
    const int i0 = locate_r0(f, M, advanced);
    if (i0 < 0) throw std::runtime_error("second_tangential_bound_check: u never reaches M");
    rep.r0 = g.r[i0];
    Barrier bar{g.R, 2, rep.r0};

    auto uthth = [&](int i, int j) {
        return (f.at(i, (j + 1) % g.n_theta) - 2.0 * f.at(i, j) +
                f.at(i, (j + g.n_theta - 1) % g.n_theta)) /
               (g.dtheta * g.dtheta);
    };
    for (int j = 0; j < g.n_theta; ++j) {
        rep.Ltilde = std::max(rep.Ltilde, uthth(i0, j));
    }
    for (int i = i0; i < g.n_r; ++i) {
        const double bound = rep.Ltilde * bar.P(g.r[i]) * (1.0 + tol) +
                             1e-12 * (1.0 + std::abs(rep.Ltilde));
        for (int j = 0; j < g.n_theta; ++j) {
            const double v = uthth(i, j);
            if (v > bound) ++rep.violations;
            if (two_sided && std::abs(v) > bound) ++rep.two_sided_violations;
        }
    }
    rep.pass = rep.violations == 0;
    return rep;
}

RadialBlowupReport radial_blowup_check(const std::vector<PolarField>& fields,
                                       double probe_frac) {
    if (fields.size() < 3) {
        throw std::invalid_argument("radial_blowup_check: need >= 3 continuation levels");
    }
    RadialBlowupReport rep;
    for (const PolarField& f : fields) {
        const PolarGrid& g = f.grid;
        const GradientField grad = gradient_decomposition(f);
        const double probe = probe_frac * g.R;
        int best = 0;
        for (int i = 1; i < g.n_r; ++i) {
            if (std::abs(g.r[i] - probe) < std::abs(g.r[best] - probe)) best = i;
        }
        double lo = grad.radial[g.idx(best, 0)], hi = lo;
        for (int j = 1; j < g.n_theta; ++j) {
            lo = std::min(lo, grad.radial[g.idx(best, j)]);
            hi = std::max(hi, grad.radial[g.idx(best, j)]);
        }
        rep.k_levels.push_back(f.boundary_k);
        rep.min_dr.push_back(lo);
        rep.uniformity.push_back(lo > 0.0 ? (hi - lo) / lo
                                          : std::numeric_limits<double>::infinity());
    }
    rep.strictly_increasing = true;
    for (std::size_t i = 0; i + 1 < rep.min_dr.size(); ++i) {
        if (!(rep.min_dr[i + 1] > rep.min_dr[i])) rep.strictly_increasing = false;
    }
    rep.uniformity_decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.uniformity.size(); ++i) {
        if (!(rep.uniformity[i + 1] <= rep.uniformity[i] * (1.0 + 1e-9)))
            rep.uniformity_decreasing = false;
    }
    rep.pass = rep.strictly_increasing && rep.uniformity_decreasing;
    return rep;
}

MinimalComparisonReport minimal_comparison_z(const PolarField& f,
                                             const SplitNonlinearity& split,
                                             double r0,
                                             const std::vector<double>& k_levels,
                                             const RadialOptions& opts) {
    const PolarGrid& g = f.grid;
    MinimalComparisonReport rep;
    int i0 = 0;
    for (int i = 0; i < g.n_r; ++i) {
        if (g.r[i] >= r0) {
            i0 = i;
            break;
        }
    }
    double inner_min = f.at(i0, 0);
    for (int j = 1; j < g.n_theta; ++j) inner_min = std::min(inner_min, f.at(i0, j));

    std::vector<double> prev;
    RadialProfile z;
    for (double k : k_levels) {
        z = solve_annulus_truncated(split.g_inf, g.r[i0], g.R, 2, inner_min, k, opts,
                                    prev.empty() ? nullptr : &prev);
        if (!z.converged) throw std::runtime_error("minimal_comparison_z: solve failed");
        prev = z.u_values;
        // int_{r0}^{R} s^{N-1} g_inf(z(s)) ds on the cells.
        double acc = 0.0;
        for (std::size_t i = 0; i < z.r_nodes.size(); ++i) {
            const double vol = 0.5 * (z.faces[i + 1] * z.faces[i + 1] -
                                      z.faces[i] * z.faces[i]);
            acc += vol * split.g_inf.g(z.u_values[i]);
        }
        rep.ginf_integral.push_back(acc);
    }
    rep.z = z;
    PchipInterpolant zi(rep.z.r_nodes, rep.z.u_values);
    for (int i = i0; i < g.n_r; ++i) {
        const double zr = zi.eval(g.r[i]);
        const double tol = 0.02 * (1.0 + std::abs(zr));
        for (int j = 0; j < g.n_theta; ++j) {
            const double deficit = zr - f.at(i, j) - tol;
            if (deficit > 0.0) {
                rep.u_dominates = false;
                rep.max_deficit = std::max(rep.max_deficit, deficit);
            }
        }
    }
    return rep;
}

} // namespace largesol
