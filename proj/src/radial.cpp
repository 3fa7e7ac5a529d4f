#include "largesol/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "largesol/fit.hpp"
#include "largesol/interp.hpp"
#include "largesol/linalg.hpp"

namespace largesol {

namespace {

struct RadialGrid {
    double r_lo = 0.0;
    double R = 1.0;
    int N = 3;
    std::vector<double> faces; // n+1 faces, faces[0] = r_lo, faces[n] = R
    std::vector<double> nodes; // n cell centers
    std::vector<double> vol;   // int r^{N-1} over the cell

    static RadialGrid build(double r_lo, double R, int N, int n, double gamma) {
        if (n < 8) throw std::invalid_argument("radial grid: need n_r >= 8");
        if (N < 2) throw std::invalid_argument("radial grid: need N >= 2");
        if (!(R > r_lo) || r_lo < 0.0) throw std::invalid_argument("radial grid: bad radii");
        RadialGrid g;
        g.r_lo = r_lo;
        g.R = R;
        g.N = N;
        // Cells below ~5e-8 of the span cannot carry a double-precision
        // second difference of a smooth profile; cap the grading there.
        const double gamma_cap = std::log(2e7) / std::log(static_cast<double>(n));
        gamma = std::clamp(gamma, 1.0, gamma_cap);
        g.faces.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double xi = static_cast<double>(i) / n;
            // gamma = 1 is uniform; larger gamma clusters cells toward R.
            const double s = 1.0 - std::pow(1.0 - xi, gamma);
            g.faces[i] = r_lo + (R - r_lo) * s;
        }
        g.faces[0] = r_lo;
        g.faces[n] = R;
        g.nodes.resize(n);
        g.vol.resize(n);
        for (int i = 0; i < n; ++i) {
            g.nodes[i] = 0.5 * (g.faces[i] + g.faces[i + 1]);
            g.vol[i] = (std::pow(g.faces[i + 1], N) - std::pow(g.faces[i], N)) / N;
        }
        return g;
    }

    bool is_ball() const { return r_lo == 0.0; }
};

struct NewtonReport {
    bool converged = false;
    double scaled_residual = 0.0;
    int iterations = 0;
};

// Residual of (u' r^{N-1})'/V = r^{N-1} g(u)/V on cell centers, ghosted
// Dirichlet data on both ends (inner ghost only when r_lo > 0).
class RadialSystem {
public:
    RadialSystem(const RadialGrid& grid, const Nonlinearity& nl, double k,
                 double inner_value, double tol = 1e-10)
        : g_(grid), nl_(nl), k_(k), inner_(inner_value), tol_(tol) {
        const int n = static_cast<int>(g_.nodes.size());
        const int nu = g_.N - 1;
        fpow_.resize(n + 1);
        for (int i = 0; i <= n; ++i) fpow_[i] = std::pow(g_.faces[i], nu);
        dplus_.resize(n);
        dminus_.resize(n);
        for (int i = 0; i < n; ++i) {
            dplus_[i] = (i + 1 < n) ? g_.nodes[i + 1] - g_.nodes[i]
                                    : 2.0 * (g_.R - g_.nodes[i]);
            dminus_[i] = (i > 0) ? g_.nodes[i] - g_.nodes[i - 1]
                                 : 2.0 * (g_.nodes[0] - g_.r_lo);
        }
    }

    void residual(const std::vector<double>& u, std::vector<double>& res) const {
        const int n = static_cast<int>(u.size());
        res.resize(n);
        for (int i = 0; i < n; ++i) {
            const double up = (i + 1 < n) ? u[i + 1] : 2.0 * k_ - u[i];
            double flux_out = fpow_[i + 1] * (up - u[i]) / dplus_[i];
            double flux_in = 0.0;
            if (i > 0) {
                flux_in = fpow_[i] * (u[i] - u[i - 1]) / dminus_[i];
            } else if (!g_.is_ball()) {
                flux_in = fpow_[0] * (2.0 * u[0] - 2.0 * inner_) / dminus_[0];
            }
            res[i] = (flux_out - flux_in) / g_.vol[i] - nl_.g(u[i]);
        }
    }

    void jacobian(const std::vector<double>& u, std::vector<double>& lower,
                  std::vector<double>& diag, std::vector<double>& upper) const {
        const int n = static_cast<int>(u.size());
        lower.assign(n, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double d = 0.0;
            if (i + 1 < n) {
                upper[i] = fpow_[i + 1] / (dplus_[i] * g_.vol[i]);
                d -= fpow_[i + 1] / (dplus_[i] * g_.vol[i]);
            } else {
                d -= 2.0 * fpow_[n] / (dplus_[i] * g_.vol[i]);
            }
            if (i > 0) {
                lower[i] = fpow_[i] / (dminus_[i] * g_.vol[i]);
                d -= fpow_[i] / (dminus_[i] * g_.vol[i]);
            } else if (!g_.is_ball()) {
                d -= 2.0 * fpow_[0] / (dminus_[0] * g_.vol[0]);
            }
            diag[i] = d - nl_.dg(u[i]);
        }
    }

    // Float evaluation floor of the flux difference at node i: the u
    // values entering the stencil carry relative rounding, amplified by
    // the flux coefficients. Dominant on graded tails where the second
    // difference of a smooth profile underflows.
    double noise_floor(const std::vector<double>& u, int i) const {
        const int n = static_cast<int>(u.size());
        double uloc = std::abs(u[i]);
        if (i > 0) uloc = std::max(uloc, std::abs(u[i - 1]));
        if (i + 1 < n) {
            uloc = std::max(uloc, std::abs(u[i + 1]));
        } else {
            uloc = std::max(uloc, std::abs(k_));
        }
        const double coef = (fpow_[i + 1] / dplus_[i] + fpow_[i] / dminus_[i]) / g_.vol[i];
        return 64.0 * 2.2e-16 * coef * uloc;
    }

    // Residual scaled against the equation size per node, minus the noise floor.
    double scaled_norm(const std::vector<double>& u, const std::vector<double>& res) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const double excess =
                std::max(std::abs(res[i]) - noise_floor(u, static_cast<int>(i)), 0.0);
            worst = std::max(worst, excess / (1.0 + std::abs(nl_.g(u[i]))));
        }
        return worst;
    }

    // Line-search merit with rows weighted so a noise-floored row counts
    // like a tol-converged one; keeps interior progress visible when the
    // boundary rows sit at their float floor.
    double merit(const std::vector<double>& u, const std::vector<double>& res) const {
        double total = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const double s = 1.0 + std::abs(nl_.g(u[i])) +
                             noise_floor(u, static_cast<int>(i)) / tol_;
            const double v = res[i] / s;
            total += v * v;
        }
        return total;
    }

private:
    const RadialGrid& g_;
    const Nonlinearity& nl_;
    double k_;
    double inner_;
    double tol_;
    std::vector<double> fpow_, dplus_, dminus_;
};

NewtonReport newton_radial(const RadialSystem& sys, std::vector<double>& u,
                           const RadialOptions& opts) {
    NewtonReport rep;
    const int n = static_cast<int>(u.size());
    std::vector<double> res, lower, diag, upper, step, trial, res_trial;
    sys.residual(u, res);
    double phi = sys.merit(u, res);
    if (!std::isfinite(phi)) return rep;
    for (int it = 0; it < opts.max_iterations; ++it) {
        rep.iterations = it;
        rep.scaled_residual = sys.scaled_norm(u, res);
        if (rep.scaled_residual <= opts.newton_tol) {
            rep.converged = true;
            return rep;
        }
        sys.jacobian(u, lower, diag, upper);
        step = res;
        for (double& s : step) s = -s;
        thomas_solve(lower, diag, upper, step);
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            trial.resize(n);
            for (int i = 0; i < n; ++i) trial[i] = u[i] + lambda * step[i];
            sys.residual(trial, res_trial);
            const double phi_t = sys.merit(trial, res_trial);
            if (std::isfinite(phi_t) && phi_t <= (1.0 - 1e-4 * lambda) * phi) {
                u.swap(trial);
                res.swap(res_trial);
                phi = phi_t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Stalled at the float evaluation floor of the residual; accept
            // when the scaled residual is already far below any check tolerance.
            rep.scaled_residual = sys.scaled_norm(u, res);
            rep.converged = rep.scaled_residual <= 100.0 * opts.newton_tol;
            return rep;
        }
    }
    rep.scaled_residual = sys.scaled_norm(u, res);
    rep.converged = rep.scaled_residual <= opts.newton_tol;
    return rep;
}

void fill_du(RadialProfile& p) {
    const int n = static_cast<int>(p.u_values.size());
    p.du_values.assign(n, 0.0);
    const auto& r = p.r_nodes;
    const auto& u = p.u_values;
    for (int i = 1; i + 1 < n; ++i) {
        p.du_values[i] = (u[i + 1] - u[i - 1]) / (r[i + 1] - r[i - 1]);
    }
    if (n >= 2) {
        if (p.r_in == 0.0) {
            // Even symmetry: mirror ghost at -r_0 carries u_0.
            p.du_values[0] = (u[1] - u[0]) / (r[1] + r[0]);
        } else {
            const double ughost = 2.0 * p.inner_value - u[0];
            p.du_values[0] = (u[1] - ughost) / (r[1] - (2.0 * p.r_in - r[0]));
        }
        const double ghost = 2.0 * p.k_level - u[n - 1];
        p.du_values[n - 1] = (ghost - u[n - 2]) / (2.0 * p.R - r[n - 1] - r[n - 2]);
    }
}

RadialProfile make_profile(const RadialGrid& grid, std::vector<double> u,
                           RadialMethod method, double k, double inner,
                           const NewtonReport& rep) {
    RadialProfile p;
    p.R = grid.R;
    p.N = grid.N;
    p.r_in = grid.r_lo;
    p.r_nodes = grid.nodes;
    p.u_values = std::move(u);
    p.method = method;
    p.k_level = k;
    p.converged = rep.converged;
    p.scaled_residual = rep.scaled_residual;
    p.newton_iterations = rep.iterations;
    p.faces = grid.faces;
    p.inner_value = inner;
    fill_du(p);
    return p;
}

std::vector<double> continuation_init(const RadialGrid& grid, double k, double inner) {
    const int n = static_cast<int>(grid.nodes.size());
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        const double x = (grid.nodes[i] - grid.r_lo) / (grid.R - grid.r_lo);
        u[i] = inner + (k - inner) * x * x;
    }
    return u;
}

} // namespace

RadialProfile solve_truncated(const Nonlinearity& nl, double R, int N, double k,
                              const RadialOptions& opts,
                              const std::vector<double>* warm_start) {
    if (!std::isfinite(k)) throw std::invalid_argument("solve_truncated: k must be finite");
    if (opts.n_r < 64) throw std::invalid_argument("solve_truncated: need n_r >= 64");
    const RadialGrid grid = RadialGrid::build(0.0, R, N, opts.n_r, opts.grading);
    RadialSystem sys(grid, nl, k, 0.0, opts.newton_tol);
    std::vector<double> u = warm_start && static_cast<int>(warm_start->size()) == opts.n_r
                                ? *warm_start
                                : continuation_init(grid, k, std::min(k, 0.0));
    const NewtonReport rep = newton_radial(sys, u, opts);
    return make_profile(grid, std::move(u), RadialMethod::continuation, k, 0.0, rep);
}

RadialProfile solve_annulus_truncated(const Nonlinearity& nl, double r_in, double R,
                                      int N, double inner_value, double k,
                                      const RadialOptions& opts,
                                      const std::vector<double>* warm_start) {
    if (!(r_in > 0.0 && r_in < R)) {
        throw std::invalid_argument("solve_annulus_truncated: need 0 < r_in < R");
    }
    if (!std::isfinite(inner_value) || !std::isfinite(k)) {
        throw std::invalid_argument("solve_annulus_truncated: data must be finite");
    }
    const RadialGrid grid = RadialGrid::build(r_in, R, N, opts.n_r, opts.grading);
    RadialSystem sys(grid, nl, k, inner_value, opts.newton_tol);
    std::vector<double> u = warm_start && static_cast<int>(warm_start->size()) == opts.n_r
                                ? *warm_start
                                : continuation_init(grid, k, inner_value);
    const NewtonReport rep = newton_radial(sys, u, opts);
    RadialProfile p = make_profile(grid, std::move(u), RadialMethod::annulus, k,
                                   inner_value, rep);
    return p;
}

std::vector<double> default_continuation_schedule(double k_max) {
    std::vector<double> ks;
    for (double k = 10.0; k <= k_max * (1.0 + 1e-12); k *= 10.0) ks.push_back(k);
    if (ks.empty()) ks.push_back(k_max);
    return ks;
}

namespace {

ContinuationResult run_continuation(const Nonlinearity& nl, double r_lo, double R, int N,
                                    double inner_value, std::vector<double> schedule,
                                    const RadialOptions& opts, double stop_tol) {
    if (schedule.empty()) schedule = default_continuation_schedule();
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (!(schedule[i] > schedule[i - 1])) {
            throw std::invalid_argument("continuation: schedule must increase");
        }
    }
    ContinuationResult out;
    std::vector<double> prev;
    RadialProfile p;
    for (double k : schedule) {
        p = (r_lo == 0.0)
                ? solve_truncated(nl, R, N, k, opts, prev.empty() ? nullptr : &prev)
                : solve_annulus_truncated(nl, r_lo, R, N, inner_value, k, opts,
                                          prev.empty() ? nullptr : &prev);
        if (!p.converged) {
            out.status = ContinuationStatus::solver_failure;
            out.profile = p;
            return out;
        }
        out.k_levels.push_back(k);
        if (!prev.empty()) {
            double change = 0.0;
            bool monotone = true;
            for (std::size_t i = 0; i < p.u_values.size(); ++i) {
                if (p.u_values[i] < prev[i] - 1e-9 * (1.0 + std::abs(p.u_values[i]))) {
                    monotone = false;
                }
                if (p.r_nodes[i] <= r_lo + 0.9 * (R - r_lo)) {
                    change = std::max(change, std::abs(p.u_values[i] - prev[i]) /
                                                  (1.0 + std::abs(p.u_values[i])));
                }
            }
            out.interior_change.push_back(change);
            if (!monotone) out.monotone_in_k = false;
            if (change <= stop_tol) {
                out.status = ContinuationStatus::converged;
                out.profile = p;
                return out;
            }
        }
        prev = p.u_values;
    }
    out.profile = p;
    if (schedule.size() == 1) {
        // A single level is a plain truncated solve; there is no k-trend
        // to judge.
        out.status = p.converged ? ContinuationStatus::converged
                                 : ContinuationStatus::solver_failure;
        return out;
    }
    // Genuine no-blow-up growth keeps the interior scaling with k, so the
    // relative change per decade stays large and does not decay; slow
    // Keller-Osserman families show large but shrinking changes instead.
    bool sustained = out.interior_change.size() >= 3 &&
                     out.interior_change.back() >= 0.5;
    if (sustained) {
        const std::size_t n_ch = out.interior_change.size();
        for (std::size_t i = n_ch - 3; i + 1 < n_ch; ++i) {
            if (out.interior_change[i + 1] < 0.95 * out.interior_change[i]) {
                sustained = false;
            }
        }
    }
    out.status = sustained ? ContinuationStatus::diverging
                           : ContinuationStatus::inconclusive;
    return out;
}

} // namespace

ContinuationResult solve_large_continuation(const Nonlinearity& nl, double R, int N,
                                            std::vector<double> k_schedule,
                                            const RadialOptions& opts, double stop_tol) {
    return run_continuation(nl, 0.0, R, N, 0.0, std::move(k_schedule), opts, stop_tol);
}

ContinuationResult solve_annulus_radial(const Nonlinearity& nl, double r_in, double R,
                                        int N, double inner_value,
                                        std::vector<double> k_schedule,
                                        const RadialOptions& opts, double stop_tol) {
    if (!(r_in > 0.0 && r_in < R)) {
        throw std::invalid_argument("solve_annulus_radial: need 0 < r_in < R");
    }
    ContinuationResult res = run_continuation(nl, r_in, R, N, inner_value,
                                              std::move(k_schedule), opts, stop_tol);
    res.profile.method = RadialMethod::annulus;
    return res;
}

// ---------------------------------------------------------------------------
// Transform solve
// ---------------------------------------------------------------------------

namespace {

// Residual of w'' + (N-1)/r w' = b(w)(w'^2 - 1) in flux form, with the
// slope clamped to |w'| <= 1 - 1e-12 and one-sided differencing of w' at
// the outer boundary node. Dirichlet w = w_in on the inner face when
// r_lo > 0, w = 0 at R always.
class WSystem {
public:
    WSystem(const RadialGrid& grid, const FTransform& tr, double w_in, double w_cap,
            double tol = 1e-10)
        : g_(grid), tr_(tr), w_in_(w_in), w_cap_(w_cap), tol_(tol) {
        const int n = static_cast<int>(g_.nodes.size());
        const int nu = g_.N - 1;
        fpow_.resize(n + 1);
        for (int i = 0; i <= n; ++i) fpow_[i] = std::pow(g_.faces[i], nu);
        dplus_.resize(n);
        dminus_.resize(n);
        for (int i = 0; i < n; ++i) {
            dplus_[i] = (i + 1 < n) ? g_.nodes[i + 1] - g_.nodes[i]
                                    : 2.0 * (g_.R - g_.nodes[i]);
            dminus_[i] = (i > 0) ? g_.nodes[i] - g_.nodes[i - 1]
                                 : 2.0 * (g_.nodes[0] - g_.r_lo);
        }
        w_reg_ = 1e-10 * g_.R;
    }

    // Slope stencil: (ds_dm, ds_dc, ds_dp) are the derivatives of the
    // clamped slope w.r.t. (w_{i-1}, w_i, w_{i+1}).
    struct Slope {
        double s, dm, dc, dp;
    };

    Slope slope(const std::vector<double>& w, int i) const {
        const int n = static_cast<int>(w.size());
        Slope sl{0, 0, 0, 0};
        if (i == n - 1) {
            // One-sided against the boundary value 0 at R.
            const double d = g_.R - g_.nodes[i];
            sl.s = -w[i] / d;
            sl.dc = -1.0 / d;
        } else if (i == 0) {
            if (g_.is_ball()) {
                const double d = g_.nodes[1] + g_.nodes[0]; // mirror ghost
                sl.s = (w[1] - w[0]) / d;
                sl.dc = -1.0 / d;
                sl.dp = 1.0 / d;
            } else {
                const double d = g_.nodes[1] - (2.0 * g_.r_lo - g_.nodes[0]);
                sl.s = (w[1] - (2.0 * w_in_ - w[0])) / d;
                sl.dc = 1.0 / d;
                sl.dp = 1.0 / d;
            }
        } else {
            const double d = g_.nodes[i + 1] - g_.nodes[i - 1];
            sl.s = (w[i + 1] - w[i - 1]) / d;
            sl.dm = -1.0 / d;
            sl.dp = 1.0 / d;
        }
        const double lim = 1.0 - 1e-12;
        if (sl.s > lim) {
            sl = {lim, 0, 0, 0};
        } else if (sl.s < -lim) {
            sl = {-lim, 0, 0, 0};
        }
        return sl;
    }

    double b_at(double w, double* dbdw = nullptr) const {
        const double wq = std::min(std::max(w, w_reg_), w_cap_);
        const auto pair = tr_.b_pair(wq);
        if (dbdw) *dbdw = (w > w_reg_ && w < w_cap_) ? pair.db_dw : 0.0;
        return pair.b;
    }

    void residual(const std::vector<double>& w, std::vector<double>& res) const {
        const int n = static_cast<int>(w.size());
        res.resize(n);
        for (int i = 0; i < n; ++i) {
            const double wp = (i + 1 < n) ? w[i + 1] : -w[i]; // ghost for w(R)=0
            double flux_out = fpow_[i + 1] * (wp - w[i]) / dplus_[i];
            double flux_in = 0.0;
            if (i > 0) {
                flux_in = fpow_[i] * (w[i] - w[i - 1]) / dminus_[i];
            } else if (!g_.is_ball()) {
                flux_in = fpow_[0] * (2.0 * w[0] - 2.0 * w_in_) / dminus_[0];
            }
            const Slope sl = slope(w, i);
            res[i] = (flux_out - flux_in) / g_.vol[i] - b_at(w[i]) * (sl.s * sl.s - 1.0);
        }
    }

    void jacobian(const std::vector<double>& w, std::vector<double>& lower,
                  std::vector<double>& diag, std::vector<double>& upper) const {
        const int n = static_cast<int>(w.size());
        lower.assign(n, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double d = 0.0;
            if (i + 1 < n) {
                upper[i] += fpow_[i + 1] / (dplus_[i] * g_.vol[i]);
                d -= fpow_[i + 1] / (dplus_[i] * g_.vol[i]);
            } else {
                d -= 2.0 * fpow_[n] / (dplus_[i] * g_.vol[i]);
            }
            if (i > 0) {
                lower[i] += fpow_[i] / (dminus_[i] * g_.vol[i]);
                d -= fpow_[i] / (dminus_[i] * g_.vol[i]);
            } else if (!g_.is_ball()) {
                d -= 2.0 * fpow_[0] / (dminus_[0] * g_.vol[0]);
            }
            double dbdw = 0.0;
            const double b = b_at(w[i], &dbdw);
            const Slope sl = slope(w, i);
            d -= dbdw * (sl.s * sl.s - 1.0);
            d -= b * 2.0 * sl.s * sl.dc;
            if (i > 0) lower[i] -= b * 2.0 * sl.s * sl.dm;
            if (i + 1 < n) upper[i] -= b * 2.0 * sl.s * sl.dp;
            diag[i] = d;
        }
    }

    double noise_floor(const std::vector<double>& w, int i) const {
        const int n = static_cast<int>(w.size());
        double wloc = std::abs(w[i]);
        if (i > 0) wloc = std::max(wloc, std::abs(w[i - 1]));
        if (i + 1 < n) wloc = std::max(wloc, std::abs(w[i + 1]));
        wloc = std::max(wloc, std::abs(w_in_));
        const double coef = (fpow_[i + 1] / dplus_[i] + fpow_[i] / dminus_[i]) / g_.vol[i];
        return 64.0 * 2.2e-16 * coef * wloc;
    }

    double scaled_norm(const std::vector<double>& w, const std::vector<double>& res) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const double excess =
                std::max(std::abs(res[i]) - noise_floor(w, static_cast<int>(i)), 0.0);
            worst = std::max(worst, excess / (1.0 + b_at(w[i])));
        }
        return worst;
    }

    double merit(const std::vector<double>& w, const std::vector<double>& res) const {
        double total = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const double s =
                1.0 + b_at(w[i]) + noise_floor(w, static_cast<int>(i)) / tol_;
            const double v = res[i] / s;
            total += v * v;
        }
        return total;
    }

    void project(std::vector<double>& w) const {
        for (double& x : w) x = std::min(std::max(x, 0.0), w_cap_);
    }

private:
    const RadialGrid& g_;
    const FTransform& tr_;
    double w_in_;
    double w_cap_;
    double tol_;
    double w_reg_;
    std::vector<double> fpow_, dplus_, dminus_;
};

NewtonReport newton_w(const WSystem& sys, std::vector<double>& w,
                      const RadialOptions& opts) {
    NewtonReport rep;
    const int n = static_cast<int>(w.size());
    std::vector<double> res, lower, diag, upper, step, trial, res_trial;
    sys.project(w);
    sys.residual(w, res);
    double phi = sys.merit(w, res);
    if (!std::isfinite(phi)) return rep;
    for (int it = 0; it < opts.max_iterations; ++it) {
        rep.iterations = it;
        rep.scaled_residual = sys.scaled_norm(w, res);
        if (rep.scaled_residual <= opts.newton_tol) {
            rep.converged = true;
            return rep;
        }
        sys.jacobian(w, lower, diag, upper);
        step = res;
        for (double& s : step) s = -s;
        thomas_solve(lower, diag, upper, step);
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            trial.resize(n);
            for (int i = 0; i < n; ++i) trial[i] = w[i] + lambda * step[i];
            sys.project(trial);
            sys.residual(trial, res_trial);
            const double phi_t = sys.merit(trial, res_trial);
            if (std::isfinite(phi_t) && phi_t <= (1.0 - 1e-4 * lambda) * phi) {
                w.swap(trial);
                res.swap(res_trial);
                phi = phi_t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            rep.scaled_residual = sys.scaled_norm(w, res);
            rep.converged = rep.scaled_residual <= opts.newton_tol * 100.0;
            return rep;
        }
    }
    rep.scaled_residual = sys.scaled_norm(w, res);
    rep.converged = rep.scaled_residual <= opts.newton_tol;
    return rep;
}

double extrapolate_center(const RadialGrid& grid, const std::vector<double>& w) {
    // Even-quadratic extrapolation through the first two nodes.
    const double r0 = grid.nodes[0];
    const double r1 = grid.nodes[1];
    return w[0] - r0 * r0 * (w[1] - w[0]) / (r1 * r1 - r0 * r0);
}

} // namespace

WTransformResult solve_w_transform(const Nonlinearity& nl, double R, int N,
                                   const WTransformOptions& opts) {
    WTransformResult out;
    double m = std::isnan(opts.m_init) ? nl.b_monotone() : opts.m_init;
    const double btol = 1e-12 * std::max(1.0, std::abs(nl.b_monotone()));
    if (m < nl.b_monotone() - btol) {
        throw std::invalid_argument("solve_w_transform: m_init below b_monotone");
    }

    const RadialGrid grid = RadialGrid::build(0.0, R, N, opts.radial.n_r, opts.radial.grading);
    const int n = opts.radial.n_r;

    auto run_ball = [&](const FTransform& tr) {
        const double cap = std::min(tr.w_sup() * (1.0 - 1e-12), tr.w_table_top());
        WSystem sys(grid, tr, 0.0, cap, opts.radial.newton_tol);
        // Cone initial guess with sub-unit slope.
        std::vector<double> w(n);
        const double vref = tr.base() + std::max(1.0, std::abs(tr.base()));
        const double apex = std::min(0.8 * R, 0.95 * tr.F(vref));
        for (int i = 0; i < n; ++i) w[i] = apex * (1.0 - grid.nodes[i] / R);
        NewtonReport rep = newton_w(sys, w, opts.radial);
        if (!rep.converged) {
            // Warm restart from a coarse continuation lift.
            RadialOptions copts = opts.radial;
            copts.n_r = std::max(128, n / 8);
            auto cont = solve_large_continuation(nl, R, N, {}, copts, 1e-8);
            if (cont.profile.converged) {
                PchipInterpolant lift(cont.profile.r_nodes, cont.profile.u_values);
                for (int i = 0; i < n; ++i) {
                    const double uc = std::max(lift.eval(grid.nodes[i]), tr.base() + 1e-12);
                    w[i] = std::min(tr.F(uc), cap);
                }
                rep = newton_w(sys, w, opts.radial);
            }
        }
        return std::pair<NewtonReport, std::vector<double>>(rep, std::move(w));
    };

    FTransform tr(nl, m);
    auto [rep, w] = run_ball(tr);
    out.outer_iterations = 1;

    if (opts.base_policy == WBasePolicy::sharp_min_u) {
        for (int outer = 1; outer < opts.max_outer && rep.converged; ++outer) {
            const double wc = std::min(extrapolate_center(grid, w), tr.w_sup());
            const double m_next = std::max(tr.inverse(std::max(wc, 1e-300)), m);
            const double rel = std::abs(m_next - m) / (1.0 + std::abs(m));
            m = m_next;
            if (rel <= 1e-8) break;
            tr = FTransform(nl, m);
            auto rerun = run_ball(tr);
            rep = rerun.first;
            w = std::move(rerun.second);
            ++out.outer_iterations;
        }
    }

    const double cap = std::min(tr.w_sup() * (1.0 - 1e-12), tr.w_table_top());
    const bool dipped = rep.converged && std::isfinite(tr.w_sup()) &&
                        w[0] >= 0.995 * cap;

    if (rep.converged && !dipped) {
        RadialProfile p;
        p.R = R;
        p.N = N;
        p.r_in = 0.0;
        p.r_nodes = grid.nodes;
        p.faces = grid.faces;
        p.u_values.resize(n);
        for (int i = 0; i < n; ++i) p.u_values[i] = tr.inverse(std::max(w[i], 1e-300));
        p.method = RadialMethod::w_transform;
        p.k_level = p.u_values.back();
        p.converged = true;
        p.scaled_residual = rep.scaled_residual;
        p.newton_iterations = rep.iterations;
        fill_du(p);
        // The outermost ghost reproduces the exact boundary value w(R) = 0;
        // report the recovered boundary datum as the last node value.
        out.profile = std::move(p);
        out.w_values = std::move(w);
        out.dw_values.assign(n, 0.0);
        // Centered slopes of w for the invariant checks.
        for (int i = 0; i < n; ++i) {
            if (i == 0) {
                out.dw_values[i] = (out.w_values[1] - out.w_values[0]) /
                                   (grid.nodes[1] + grid.nodes[0]);
            } else if (i + 1 == n) {
                out.dw_values[i] = -out.w_values[i] / (R - grid.nodes[i]);
            } else {
                out.dw_values[i] = (out.w_values[i + 1] - out.w_values[i - 1]) /
                                   (grid.nodes[i + 1] - grid.nodes[i - 1]);
            }
        }
        out.w_boundary = 0.0;
        out.m_base = tr.base();
        out.min_u = tr.inverse(std::max(std::min(extrapolate_center(grid, out.w_values),
                                                 cap),
                                        1e-300));
        return out;
    }

    // Matched fallback: transform on an outer annulus, continuation inside.
    out.matched_fallback = true;
    auto cont = solve_large_continuation(nl, R, N, {}, opts.radial, 1e-8);
    if (cont.status != ContinuationStatus::converged &&
        cont.status != ContinuationStatus::inconclusive) {
        throw std::runtime_error("solve_w_transform: fallback continuation failed");
    }
    const RadialProfile& base_prof = cont.profile;
    const double v_floor = m + 0.1 * (1.0 + std::abs(m));
    int star = -1;
    for (int i = 0; i < n; ++i) {
        if (interp_profile(base_prof, grid.nodes[i]) >= v_floor) {
            star = i;
            break;
        }
    }
    if (star < 0 || star >= n - 8) {
        throw std::runtime_error("solve_w_transform: no annulus with u above the base");
    }
    const double r_star = grid.faces[star];
    out.fallback_r_star = r_star;
    const int n_ann = n - star;
    // Reuse the tail of the ball grid so the matched nodes line up exactly.
    RadialGrid ann;
    ann.r_lo = r_star;
    ann.R = R;
    ann.N = N;
    ann.faces.assign(grid.faces.begin() + star, grid.faces.end());
    ann.nodes.assign(grid.nodes.begin() + star, grid.nodes.end());
    ann.vol.assign(grid.vol.begin() + star, grid.vol.end());
    const double u_star = interp_profile(base_prof, r_star);
    const double w_in = tr.F(u_star);
    const double cap2 = std::min(tr.w_sup() * (1.0 - 1e-12), tr.w_table_top());
    WSystem sys(ann, tr, w_in, cap2, opts.radial.newton_tol);
    std::vector<double> wa(n_ann);
    {
        PchipInterpolant base_interp(base_prof.r_nodes, base_prof.u_values);
        for (int i = 0; i < n_ann; ++i) {
            const double uc = std::max(base_interp.eval(ann.nodes[i]), m + 1e-12);
            wa[i] = std::min(tr.F(uc), cap2);
        }
    }
    NewtonReport rep2 = newton_w(sys, wa, opts.radial);
    if (!rep2.converged) {
        throw std::runtime_error("solve_w_transform: matched annulus solve failed");
    }
    RadialProfile p;
    p.R = R;
    p.N = N;
    p.r_in = 0.0;
    p.r_nodes = grid.nodes;
    p.faces = grid.faces;
    p.u_values.resize(n);
    {
        PchipInterpolant base_interp(base_prof.r_nodes, base_prof.u_values);
        for (int i = 0; i < star; ++i) p.u_values[i] = base_interp.eval(grid.nodes[i]);
    }
    for (int i = star; i < n; ++i) {
        p.u_values[i] = tr.inverse(std::max(wa[i - star], 1e-300));
    }
    p.method = RadialMethod::w_transform;
    p.k_level = p.u_values.back();
    p.converged = true;
    p.scaled_residual = std::max(rep2.scaled_residual, base_prof.scaled_residual);
    p.newton_iterations = rep2.iterations;
    fill_du(p);
    out.profile = std::move(p);
    out.w_values = std::move(wa);
    out.w_offset = star;
    out.dw_values.assign(n_ann, 0.0);
    for (int i = 0; i < n_ann; ++i) {
        if (i == 0) {
            out.dw_values[i] = (out.w_values[1] - out.w_values[0]) / (ann.nodes[1] - ann.nodes[0]);
        } else if (i + 1 == n_ann) {
            out.dw_values[i] = -out.w_values[i] / (R - ann.nodes[i]);
        } else {
            out.dw_values[i] = (out.w_values[i + 1] - out.w_values[i - 1]) /
                               (ann.nodes[i + 1] - ann.nodes[i - 1]);
        }
    }
    out.w_boundary = 0.0;
    out.m_base = tr.base();
    out.min_u = u_star;
    return out;
}

// ---------------------------------------------------------------------------
// Bracket, rate fit, diagnostics
// ---------------------------------------------------------------------------

BracketResult maximal_solution_bracket(const Nonlinearity& nl, double R, int N,
                                       std::vector<double> shrink,
                                       const RadialOptions& opts) {
    if (shrink.empty()) shrink = {1e-1, 1e-2, 1e-3, 1e-4};
    std::sort(shrink.begin(), shrink.end(), std::greater<>());
    BracketResult out;
    out.shrink_levels = shrink;
    auto minimal = solve_large_continuation(nl, R, N, {}, opts, 1e-9);
    if (minimal.status == ContinuationStatus::solver_failure) {
        throw std::runtime_error("maximal_solution_bracket: minimal solve failed");
    }
    out.minimal = minimal.profile;
    std::vector<double> prev_on_ref;
    for (double s : shrink) {
        const double Rp = R * (1.0 - s);
        auto upper = solve_large_continuation(nl, Rp, N, {}, opts, 1e-9);
        if (upper.status == ContinuationStatus::solver_failure) {
            throw std::runtime_error("maximal_solution_bracket: shrink solve failed");
        }
        std::vector<double> on_ref;
        for (double r : out.minimal.r_nodes) {
            if (r <= 0.9 * R) on_ref.push_back(interp_profile(upper.profile, r));
        }
        if (!prev_on_ref.empty()) {
            for (std::size_t i = 0; i < on_ref.size(); ++i) {
                if (on_ref[i] > prev_on_ref[i] + 1e-7 * (1.0 + std::abs(on_ref[i]))) {
                    out.ordered = false;
                }
            }
        }
        prev_on_ref = on_ref;
        out.maximal = upper.profile;
    }
    double gap = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < out.minimal.r_nodes.size(); ++i) {
        if (out.minimal.r_nodes[i] <= 0.9 * R) {
            const double diff = std::abs(prev_on_ref[j] - out.minimal.u_values[i]) /
                                (1.0 + std::abs(out.minimal.u_values[i]));
            gap = std::max(gap, diff);
            ++j;
        }
    }
    out.gap = gap;
    return out;
}

BlowupRateFit blowup_rate_fit(const RadialProfile& p, double window_lo,
                              double window_hi) {
    if (!(window_lo >= 0.9 * p.R - 1e-12) || !(window_hi <= p.R) ||
        !(window_lo < window_hi)) {
        throw std::invalid_argument("blowup_rate_fit: window must sit inside (0.9R, R)");
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < p.r_nodes.size(); ++i) {
        const double r = p.r_nodes[i];
        if (r >= window_lo && r <= window_hi && p.u_values[i] > 0.0) {
            xs.push_back(std::log(p.R - r));
            ys.push_back(std::log(p.u_values[i]));
        }
    }
    if (xs.size() < 8) throw std::invalid_argument("blowup_rate_fit: window too thin");
    const LinearFit fit = linear_fit(xs, ys);
    BlowupRateFit out;
    out.exponent = -fit.slope;
    out.constant = std::exp(fit.intercept);
    out.residual = fit.rms_residual;
    out.poor_fit = fit.rms_residual > 0.05;
    return out;
}

double max_scaled_residual(const RadialProfile& p, const Nonlinearity& nl) {
    const int n = static_cast<int>(p.u_values.size());
    const int nu = p.N - 1;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fo = std::pow(p.faces[i + 1], nu);
        const double fi = std::pow(p.faces[i], nu);
        const double vol = (std::pow(p.faces[i + 1], p.N) - std::pow(p.faces[i], p.N)) / p.N;
        const double dp = (i + 1 < n) ? p.r_nodes[i + 1] - p.r_nodes[i]
                                      : 2.0 * (p.R - p.r_nodes[i]);
        const double dm = (i > 0) ? p.r_nodes[i] - p.r_nodes[i - 1]
                                  : 2.0 * (p.r_nodes[0] - p.r_in);
        const double up = (i + 1 < n) ? p.u_values[i + 1] : 2.0 * p.k_level - p.u_values[i];
        double flux_out = fo * (up - p.u_values[i]) / dp;
        double flux_in = 0.0;
        if (i > 0) {
            flux_in = fi * (p.u_values[i] - p.u_values[i - 1]) / dm;
        } else if (p.r_in > 0.0) {
            flux_in = fi * (2.0 * p.u_values[0] - 2.0 * p.inner_value) / dm;
        }
        const double res = (flux_out - flux_in) / vol - nl.g(p.u_values[i]);
        worst = std::max(worst, std::abs(res) / (1.0 + std::abs(nl.g(p.u_values[i]))));
    }
    return worst;
}

double energy_inequality_slack(const RadialProfile& p, const Nonlinearity& nl,
                               double m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.u_values.size(); ++i) {
        const double u = p.u_values[i];
        if (u <= m + 1e-9 * (1.0 + std::abs(m))) continue;
        const double H = nl.Htilde(u, m);
        if (H <= 0.0) continue;
        worst = std::max(worst, p.du_values[i] / std::sqrt(2.0 * H));
    }
    return worst;
}

double interp_profile(const RadialProfile& p, double r) {
    PchipInterpolant interp(p.r_nodes, p.u_values);
    return interp.eval(r);
}

} // namespace largesol
