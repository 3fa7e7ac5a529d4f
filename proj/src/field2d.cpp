#include "largesol/field2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "largesol/interp.hpp"
#include "largesol/linalg.hpp"

namespace largesol {

PolarGrid PolarGrid::build(double r_in, double R, int n_r, int n_theta, double grading) {
    if (n_theta < 16 || n_theta % 2 != 0) {
        throw std::invalid_argument("PolarGrid: n_theta must be even and >= 16");
    }
    if (n_r < 8) throw std::invalid_argument("PolarGrid: need n_r >= 8");
    if (!(R > r_in) || r_in < 0.0) throw std::invalid_argument("PolarGrid: bad radii");
    PolarGrid g;
    g.r_in = r_in;
    g.R = R;
    g.n_r = n_r;
    g.n_theta = n_theta;
    g.grading = grading;
    g.faces.resize(n_r + 1);
    for (int i = 0; i <= n_r; ++i) {
        const double xi = static_cast<double>(i) / n_r;
        g.faces[i] = r_in + (R - r_in) * (1.0 - std::pow(1.0 - xi, grading));
    }
    g.faces[0] = r_in;
    g.faces[n_r] = R;
    g.r.resize(n_r);
    for (int i = 0; i < n_r; ++i) g.r[i] = 0.5 * (g.faces[i] + g.faces[i + 1]);
    g.dtheta = 2.0 * std::acos(-1.0) / n_theta;
    g.theta.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) g.theta[j] = j * g.dtheta;
    return g;
}

namespace {

// Newton assembly for Delta u = g(u) on the polar grid (N = 2). The
// radial part is in flux form, so the disk pole needs no special casing:
// the r = 0 face carries zero flux identically.
class FieldSystem {
public:
    FieldSystem(const PolarGrid& grid, const Nonlinearity& nl, double k,
                const std::vector<double>& inner, double tol = 1e-9)
        : g_(grid), nl_(nl), k_(k), inner_(inner), tol_(tol) {
        const int n = g_.n_r;
        vol_.resize(n);
        up_.resize(n);
        lo_.resize(n);
        ctheta_.resize(n);
        for (int i = 0; i < n; ++i) {
            vol_[i] = 0.5 * (g_.faces[i + 1] * g_.faces[i + 1] - g_.faces[i] * g_.faces[i]);
            const double dp = (i + 1 < n) ? g_.r[i + 1] - g_.r[i] : 2.0 * (g_.R - g_.r[i]);
            const double dm = (i > 0) ? g_.r[i] - g_.r[i - 1] : 2.0 * (g_.r[0] - g_.r_in);
            up_[i] = g_.faces[i + 1] / (dp * vol_[i]);
            lo_[i] = g_.faces[i] / (dm * vol_[i]);
            ctheta_[i] = 1.0 / (g_.r[i] * g_.r[i] * g_.dtheta * g_.dtheta);
        }
    }

    void residual(const std::vector<double>& u, std::vector<double>& res) const {
        const int n = g_.n_r;
        const int nt = g_.n_theta;
        res.resize(u.size());
        for (int i = 0; i < n; ++i) {
            const double* ui = &u[g_.idx(i, 0)];
            const double* uin = (i + 1 < n) ? &u[g_.idx(i + 1, 0)] : nullptr;
            const double* uim = (i > 0) ? &u[g_.idx(i - 1, 0)] : nullptr;
            double* ri = &res[g_.idx(i, 0)];
            for (int j = 0; j < nt; ++j) {
                const double uc = ui[j];
                const double uplus = uin ? uin[j] : 2.0 * k_ - uc;
                double acc = up_[i] * (uplus - uc);
                if (uim) {
                    acc -= lo_[i] * (uc - uim[j]);
                } else if (!g_.is_disk()) {
                    acc -= lo_[0] * (2.0 * uc - 2.0 * inner_[j]);
                }
                const double ut_p = ui[(j + 1) % nt];
                const double ut_m = ui[(j + nt - 1) % nt];
                acc += ctheta_[i] * (ut_p - 2.0 * uc + ut_m);
                ri[j] = acc - nl_.g(uc);
            }
        }
    }

    // Block-tridiagonal Jacobian pieces for BlockRingSolver.
    void jacobian(const std::vector<double>& u,
                  std::vector<std::vector<double>>& main_diag,
                  std::vector<double>& theta_off, std::vector<double>& lower,
                  std::vector<double>& upper) const {
        const int n = g_.n_r;
        const int nt = g_.n_theta;
        main_diag.assign(n, std::vector<double>(nt, 0.0));
        theta_off.resize(n);
        lower.assign(n, 0.0);
        upper.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            theta_off[i] = ctheta_[i];
            double base = -2.0 * ctheta_[i];
            if (i + 1 < n) {
                upper[i] = up_[i];
                base -= up_[i];
            } else {
                base -= 2.0 * up_[i];
            }
            if (i > 0) {
                lower[i] = lo_[i];
                base -= lo_[i];
            } else if (!g_.is_disk()) {
                base -= 2.0 * lo_[0];
            }
            for (int j = 0; j < nt; ++j) {
                main_diag[i][j] = base - nl_.dg(u[g_.idx(i, j)]);
            }
        }
    }

    double noise_floor(const std::vector<double>& u, std::size_t q) const {
        const int nt = g_.n_theta;
        const int i = static_cast<int>(q) / nt;
        double uloc = std::abs(u[q]);
        if (i + 1 < g_.n_r) {
            uloc = std::max(uloc, std::abs(u[q + nt]));
        } else {
            uloc = std::max(uloc, std::abs(k_));
        }
        if (i > 0) uloc = std::max(uloc, std::abs(u[q - nt]));
        const double coef = up_[i] + lo_[i] + 2.0 * ctheta_[i];
        return 64.0 * 2.2e-16 * coef * uloc;
    }

    double scaled_norm(const std::vector<double>& u, const std::vector<double>& res) const {
        double worst = 0.0;
        for (std::size_t q = 0; q < res.size(); ++q) {
            const double excess = std::max(std::abs(res[q]) - noise_floor(u, q), 0.0);
            worst = std::max(worst, excess / (1.0 + std::abs(nl_.g(u[q]))));
        }
        return worst;
    }

    double merit(const std::vector<double>& u, const std::vector<double>& res) const {
        double total = 0.0;
        for (std::size_t q = 0; q < res.size(); ++q) {
            const double s = 1.0 + std::abs(nl_.g(u[q])) + noise_floor(u, q) / tol_;
            const double v = res[q] / s;
            total += v * v;
        }
        return total;
    }

private:
    const PolarGrid& g_;
    const Nonlinearity& nl_;
    double k_;
    const std::vector<double>& inner_;
    double tol_;
    std::vector<double> vol_, up_, lo_, ctheta_;
};

struct Newton2DReport {
    bool converged = false;
    double scaled_residual = 0.0;
    int iterations = 0;
};

// Damped Newton with factorization reuse: the block LU is refreshed only
// when the step contraction degrades, which keeps the refined grids
// affordable without changing the converged state.
Newton2DReport newton_field(const FieldSystem& sys, std::vector<double>& u,
                            const FieldOptions& opts, const PolarGrid& grid) {
    Newton2DReport rep;
    BlockRingSolver solver;
    std::vector<std::vector<double>> main_diag;
    std::vector<double> theta_off, lower, upper;
    std::vector<double> res, step, trial, res_trial;

    sys.residual(u, res);
    double phi = sys.merit(u, res);
    if (!std::isfinite(phi)) return rep;
    bool need_refresh = true;
    bool fresh = false;
    double best_seen = phi;
    int stagnant = 0;

    for (int it = 0; it < opts.max_iterations; ++it) {
        rep.iterations = it;
        rep.scaled_residual = sys.scaled_norm(u, res);
        if (!opts.drive_to_stagnation && rep.scaled_residual <= opts.newton_tol) {
            rep.converged = true;
            return rep;
        }
        if (opts.drive_to_stagnation && stagnant >= 3) {
            rep.converged = rep.scaled_residual <= opts.newton_tol * 1e3;
            return rep;
        }

        if (need_refresh) {
            sys.jacobian(u, main_diag, theta_off, lower, upper);
            solver.factor(grid.n_r, grid.n_theta, main_diag, theta_off, lower, upper);
            need_refresh = false;
            fresh = true;
        }
        step = res;
        for (double& s : step) s = -s;
        solver.solve(step);

        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            trial.resize(u.size());
            for (std::size_t q = 0; q < u.size(); ++q) trial[q] = u[q] + lambda * step[q];
            sys.residual(trial, res_trial);
            const double phi_t = sys.merit(trial, res_trial);
            if (std::isfinite(phi_t) && phi_t <= (1.0 - 1e-4 * lambda) * phi) {
                // Reused factorizations are kept only while the step
                // contracts well and stays undamped.
                if (phi_t > 0.04 * phi || lambda < 1.0) need_refresh = true;
                u.swap(trial);
                res.swap(res_trial);
                phi = phi_t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (opts.verbose > 0) {
            std::printf(
                "  newton2d it=%3d phi=%.6e scaled=%.3e accepted=%d lambda=%.3e fresh=%d\n",
                it, phi, rep.scaled_residual, accepted ? 1 : 0, lambda, fresh ? 1 : 0);
        }
        if (!accepted) {
            if (!fresh) {
                need_refresh = true;
                fresh = false;
                continue; // retry with a fresh factorization before giving up
            }
            rep.scaled_residual = sys.scaled_norm(u, res);
            rep.converged = rep.scaled_residual <= 100.0 * opts.newton_tol;
            return rep;
        }
        fresh = false;
        if (phi >= 0.5 * best_seen) {
            ++stagnant;
        } else {
            stagnant = 0;
            best_seen = phi;
        }
    }
    rep.scaled_residual = sys.scaled_norm(u, res);
    rep.converged = rep.scaled_residual <= opts.newton_tol;
    return rep;
}

} // namespace

std::vector<double> lift_radial(const RadialProfile& p, const PolarGrid& grid) {
    PchipInterpolant interp(p.r_nodes, p.u_values);
    std::vector<double> u(static_cast<std::size_t>(grid.n_r) * grid.n_theta);
    for (int i = 0; i < grid.n_r; ++i) {
        const double v = interp.eval(grid.r[i]);
        for (int j = 0; j < grid.n_theta; ++j) u[grid.idx(i, j)] = v;
    }
    return u;
}

PolarField solve_disk(const Nonlinearity& nl, const PolarGrid& grid, double k,
                      const DiskInit& init, const FieldOptions& opts) {
    if (!grid.is_disk()) throw std::invalid_argument("solve_disk: grid has r_in > 0");
    if (!std::isfinite(k)) throw std::invalid_argument("solve_disk: k must be finite");

    std::vector<double> u;
    switch (init.kind) {
        case DiskInitKind::constant:
            u.assign(static_cast<std::size_t>(grid.n_r) * grid.n_theta,
                     init.constant_value);
            break;
        case DiskInitKind::radial_lift:
        case DiskInitKind::perturbed: {
            // Same radial resolution as the rings: the lifted profile is
            // then an exact discrete solution of the theta-uniform system.
            RadialOptions ropts;
            ropts.n_r = grid.n_r;
            ropts.grading = grid.grading;
            std::vector<double> schedule;
            for (double kk = 10.0; kk < k * (1.0 - 1e-12); kk *= 10.0) schedule.push_back(kk);
            schedule.push_back(k);
            RadialProfile lift;
            std::vector<double> prev;
            if (!std::isnan(init.branch_guess)) {
                prev.assign(ropts.n_r, init.branch_guess);
            }
            for (double kk : schedule) {
                lift = solve_truncated(nl, grid.R, 2, kk, ropts,
                                       prev.empty() ? nullptr : &prev);
                prev = lift.u_values;
            }
            if (!lift.converged) throw std::runtime_error("solve_disk: radial lift failed");
            u = lift_radial(lift, grid);
            if (init.kind == DiskInitKind::perturbed) {
                std::mt19937_64 rng(init.seed);
                std::uniform_real_distribution<double> unif(-1.0, 1.0);
                for (double& v : u) v *= 1.0 + init.amplitude * unif(rng);
            }
            break;
        }
    }

    static const std::vector<double> no_inner;
    FieldSystem sys(grid, nl, k, no_inner, opts.newton_tol);
    const Newton2DReport rep = newton_field(sys, u, opts, grid);

    PolarField f;
    f.grid = grid;
    f.values = std::move(u);
    f.boundary_k = k;
    f.converged = rep.converged;
    f.scaled_residual = rep.scaled_residual;
    f.newton_iterations = rep.iterations;
    return f;
}

PolarField solve_annulus_2d(const Nonlinearity& nl, const PolarGrid& grid, double k,
                            const std::vector<double>& inner_data,
                            const FieldOptions& opts, const PolarField* warm_start) {
    if (grid.is_disk()) throw std::invalid_argument("solve_annulus_2d: grid has r_in = 0");
    if (static_cast<int>(inner_data.size()) != grid.n_theta) {
        throw std::invalid_argument("solve_annulus_2d: inner_data size mismatch");
    }
    for (double v : inner_data) {
        if (!std::isfinite(v)) throw std::invalid_argument("solve_annulus_2d: inner data not finite");
    }

    std::vector<double> u;
    if (warm_start && warm_start->values.size() ==
                          static_cast<std::size_t>(grid.n_r) * grid.n_theta) {
        u = warm_start->values;
    } else {
        // Lift of the 1D annulus solve with the mean inner datum; the
        // theta-dependence enters through the ghost ring only.
        double mean = 0.0;
        for (double v : inner_data) mean += v;
        mean /= inner_data.size();
        RadialOptions ropts;
        ropts.n_r = grid.n_r;
        ropts.grading = grid.grading;
        std::vector<double> schedule;
        for (double kk = std::max(10.0, mean); kk < k * (1.0 - 1e-12); kk *= 10.0) {
            schedule.push_back(kk);
        }
        schedule.push_back(k);
        RadialProfile lift;
        std::vector<double> prev;
        for (double kk : schedule) {
            lift = solve_annulus_truncated(nl, grid.r_in, grid.R, 2, mean, kk, ropts,
                                           prev.empty() ? nullptr : &prev);
            prev = lift.u_values;
        }
        if (!lift.converged) {
            throw std::runtime_error("solve_annulus_2d: radial lift failed");
        }
        u = lift_radial(lift, grid);
    }

    FieldSystem sys(grid, nl, k, inner_data, opts.newton_tol);
    const Newton2DReport rep = newton_field(sys, u, opts, grid);

    PolarField f;
    f.grid = grid;
    f.values = std::move(u);
    f.boundary_k = k;
    f.inner_data = inner_data;
    f.converged = rep.converged;
    f.scaled_residual = rep.scaled_residual;
    f.newton_iterations = rep.iterations;
    return f;
}

std::vector<PolarField> solve_annulus_2d_continuation(
    const Nonlinearity& nl, const PolarGrid& grid,
    const std::vector<double>& k_levels, const std::vector<double>& inner_data,
    const FieldOptions& opts) {
    std::vector<PolarField> fields;
    const PolarField* warm = nullptr;
    for (double k : k_levels) {
        fields.push_back(solve_annulus_2d(nl, grid, k, inner_data, opts, warm));
        warm = &fields.back();
        if (!fields.back().converged) break;
    }
    return fields;
}

GradientField gradient_decomposition(const PolarField& f) {
    const PolarGrid& g = f.grid;
    GradientField out;
    out.grid = g;
    out.radial.resize(f.values.size());
    out.tangential.resize(f.values.size());
    const int n = g.n_r;
    const int nt = g.n_theta;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nt; ++j) {
            double dr;
            if (i == 0) {
                dr = (f.at(1, j) - f.at(0, j)) / (g.r[1] - g.r[0]);
            } else if (i + 1 == n) {
                dr = (f.at(n - 1, j) - f.at(n - 2, j)) / (g.r[n - 1] - g.r[n - 2]);
            } else {
                dr = (f.at(i + 1, j) - f.at(i - 1, j)) / (g.r[i + 1] - g.r[i - 1]);
            }
            out.radial[g.idx(i, j)] = dr;
            const double dth = (f.at(i, (j + 1) % nt) - f.at(i, (j + nt - 1) % nt)) /
                               (2.0 * g.dtheta);
            out.tangential[g.idx(i, j)] = dth / g.r[i];
        }
    }
    return out;
}

double field_max_scaled_residual(const PolarField& f, const Nonlinearity& nl) {
    FieldSystem sys(f.grid, nl, f.boundary_k, f.inner_data);
    std::vector<double> res;
    sys.residual(f.values, res);
    return sys.scaled_norm(f.values, res);
}

} // namespace largesol
