#include "largesol/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "largesol/quadrature.hpp"

namespace largesol {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FTransform::FTransform(const Nonlinearity& nl, double m)
    : FTransform(nl, m, Options()) {}

FTransform::FTransform(const Nonlinearity& nl, double m, Options opts) : nl_(nl), m_(m) {
    const double btol = 1e-12 * std::max(1.0, std::abs(nl.b_monotone()));
    if (m < nl.b_monotone() - btol) {
        throw std::domain_error("FTransform: base below b_monotone");
    }
    const double scale = std::max(1.0, std::abs(m));
    const double v_cap = opts.v_cap > 0.0 ? opts.v_cap : 1e12 * scale;
    const double x_min = opts.x_min_rel * scale;
    const double x_max = v_cap - m;
    if (x_max <= x_min * 10.0) throw std::invalid_argument("FTransform: v_cap too small");

    // Positivity of g beyond the base.
    for (int i = 0; i <= 24; ++i) {
        const double x = x_min * std::pow(x_max / x_min, i / 24.0);
        if (!(nl_.g(m + x) > 0.0)) {
            throw std::domain_error("FTransform: g nonpositive above the base point");
        }
    }

    const int decades = static_cast<int>(std::ceil(std::log10(x_max / x_min)));
    int n = std::max(64, decades * opts.pts_per_decade) + 1;
    x_.resize(n);
    for (int i = 0; i < n; ++i) {
        x_[i] = x_min * std::pow(x_max / x_min, i / (n - 1.0));
    }
    x_.back() = x_max;

    // Cumulative primitive Htilde on the knots: positive integrand, no
    // cancellation. Fast-growing families (exponential) overflow before
    // the nominal cap; the table is truncated there, where F is already
    // far below any representable query.
    H_.assign(n, 0.0);
    H_[0] = gauss_legendre_15([&](double x) { return nl_.g(m_ + x); }, 0.0, x_[0]);
    int usable = std::isfinite(H_[0]) && H_[0] < 1e290 ? n : 0;
    for (int i = 1; i < n; ++i) {
        H_[i] = H_[i - 1] +
                gauss_legendre_15([&](double x) { return nl_.g(m_ + x); }, x_[i - 1], x_[i]);
        if (!std::isfinite(H_[i]) || H_[i] > 1e290) {
            usable = i;
            break;
        }
    }
    if (usable < 48) {
        throw std::runtime_error("FTransform: primitive not positive on table");
    }
    if (usable < n) {
        n = usable;
        x_.resize(n);
        H_.resize(n);
    }
    for (int i = 0; i < n; ++i) {
        if (!(H_[i] > 0.0)) {
            throw std::runtime_error("FTransform: primitive not positive on table");
        }
    }

    // Local exponent of Htilde at the top decides tail admissibility:
    // the transform integral converges iff the decay beats 1/v.
    {
        const double l1 = std::log(H_[n - 9]);
        const double l2 = std::log(H_[n - 1]);
        tail_p_ = (l2 - l1) / (std::log(x_[n - 1]) - std::log(x_[n - 9]));
        if (tail_p_ <= 2.0 + 2.0 * opts.ko_margin) {
            throw std::domain_error(
                "FTransform: tail of the primitive too slow, transform diverges "
                "(Keller-Osserman condition violated)");
        }
        tail_F_ = std::pow(2.0 * H_[n - 1], -0.5) * x_[n - 1] / (0.5 * tail_p_ - 1.0);
    }

    // Cumulative F from the top down. Inside each panel Htilde is refined
    // from the lower knot so the integrand stays consistent with the table.
    F_.assign(n, 0.0);
    F_[n - 1] = tail_F_;
    for (int i = n - 1; i > 0; --i) {
        const double Hlo = H_[i - 1];
        const double xlo = x_[i - 1];
        auto f = [&](double x) {
            const double Hx = Hlo + gauss_legendre_15(
                                        [&](double t) { return nl_.g(m_ + t); }, xlo, x);
            return 1.0 / std::sqrt(2.0 * Hx);
        };
        F_[i - 1] = F_[i] + gauss_legendre_15(f, x_[i - 1], x_[i]);
    }

    // Base cell [0, x_min]: substitution x = t^2 removes the
    // inverse-square-root singularity when g(m) > 0. A vanishing g(m)
    // makes F(m) itself divergent; the supremum is then infinite. The
    // zero test allows for the float rounding of g at an exact root
    // (e.g. the cubic family at sqrt(lambda)).
    const double gm = nl_.g(m_);
    const double g_eval_noise = 1e-10 * (1.0 + std::abs(m_) * std::abs(nl_.dg(m_)));
    if (gm > g_eval_noise) {
        auto fsub = [&](double t) {
            const double x = t * t;
            const double Hx =
                gauss_legendre_15([&](double s) { return nl_.g(m_ + s); }, 0.0, x);
            return 2.0 * t / std::sqrt(2.0 * std::max(Hx, 1e-300));
        };
        w_sup_ = F_[0] + gauss_legendre_15(fsub, 0.0, std::sqrt(x_min));
    } else {
        w_sup_ = kInf;
    }
}

double FTransform::integrand(double x) const { return 1.0 / std::sqrt(2.0 * htilde(m_ + x)); }

double FTransform::htilde(double v) const {
    const double x = v - m_;
    if (x <= 0.0) return 0.0;
    if (x <= x_.front()) {
        return gauss_legendre_15([&](double t) { return nl_.g(m_ + t); }, 0.0, x);
    }
    if (x >= x_.back()) {
        return H_.back() * std::pow(x / x_.back(), tail_p_);
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return H_[i] + gauss_legendre_15([&](double t) { return nl_.g(m_ + t); }, x_[i], x);
}

double FTransform::F_of_x(double x) const {
    if (x >= x_.back()) {
        // Power-model tail beyond the table.
        return tail_F_ * std::pow(x / x_.back(), 1.0 - 0.5 * tail_p_);
    }
    if (x <= x_.front()) {
        if (x <= 0.0) {
            if (w_sup_ == kInf) {
                throw std::domain_error("FTransform::F: F(m) divergent");
            }
            return w_sup_;
        }
        auto fsub = [&](double t) {
            const double xx = t * t;
            return 2.0 * t / std::sqrt(2.0 * std::max(htilde(m_ + xx), 1e-300));
        };
        return F_[0] + gauss_legendre_15(fsub, std::sqrt(x), std::sqrt(x_.front()));
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    auto f = [&](double t) {
        const double Ht = H_[i] + gauss_legendre_15(
                                      [&](double s) { return nl_.g(m_ + s); }, x_[i], t);
        return 1.0 / std::sqrt(2.0 * Ht);
    };
    return F_[i + 1] +
           gauss_legendre_15(f, x, x_[i + 1]);
}

double FTransform::F(double v) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(m_));
    if (v < m_ - tol) throw std::domain_error("FTransform::F: v < m");
    const double x = std::max(v - m_, 0.0);
    if (x == 0.0) {
        if (w_sup_ == kInf) throw std::domain_error("FTransform::F: F(m) divergent");
        return w_sup_;
    }
    return F_of_x(x);
}

double FTransform::x_of_w(double w) const {
    if (!(w > 0.0)) throw std::out_of_range("FTransform::inverse: w must be positive");
    if (w > w_sup_ * (1.0 + 1e-12)) {
        throw std::out_of_range("FTransform::inverse: w above the supremum of F");
    }
    // Bracket on the stored decreasing table.
    if (w <= F_.back()) {
        // Tail inversion from the power model.
        const double r = w / tail_F_;
        return x_.back() * std::pow(r, 1.0 / (1.0 - 0.5 * tail_p_));
    }
    std::size_t lo, hi;
    if (w >= F_.front()) {
        // Base cell: bisect on [0, x_front] against the substitution form.
        double a = 0.0, b = x_.front();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            const double val = (mid <= 0.0) ? w_sup_ : F_of_x(mid);
            if (val > w) a = mid; else b = mid;
            if (b - a <= 1e-15 * std::max(b, 1e-300)) break;
        }
        return 0.5 * (a + b);
    }
    // Binary search: F_ decreasing.
    lo = 0;
    hi = x_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (F_[mid] >= w) lo = mid; else hi = mid;
    }
    // Newton polish with the analytic derivative F' = -(2 Htilde)^{-1/2}.
    // The stopping rule is relative to w itself: the inverse loses the
    // factor |F'| in v, so an absolute F tolerance would be far too loose
    // on the flat tail of the transform.
    double x = x_[lo] + (x_[hi] - x_[lo]) * (F_[lo] - w) / std::max(F_[lo] - F_[hi], 1e-300);
    double xa = x_[lo], xb = x_[hi];
    for (int it = 0; it < 80; ++it) {
        const double fx = F_of_x(x) - w;
        if (std::abs(fx) <= 1e-14 * w + 1e-290) break;
        if (fx > 0.0) xa = x; else xb = x; // F decreasing: fx>0 means x too small
        const double step = fx / integrand(x); // dF/dx = -integrand
        double xn = x + step;
        if (!(xn > xa && xn < xb)) xn = 0.5 * (xa + xb);
        if (xn == x) break;
        x = xn;
    }
    return x;
}

double FTransform::inverse(double w) const { return m_ + x_of_w(w); }

double FTransform::b_of_w(double w) const {
    const double v = inverse(w);
    return nl_.g(v) / std::sqrt(2.0 * std::max(htilde(v), 1e-300));
}

double FTransform::db_dw(double w) const {
    const double v = inverse(w);
    const double H = std::max(htilde(v), 1e-300);
    const double gv = nl_.g(v);
    return gv * gv / (2.0 * H) - nl_.dg(v);
}

FTransform::BPair FTransform::b_pair(double w) const {
    const double v = inverse(w);
    const double H = std::max(htilde(v), 1e-300);
    const double gv = nl_.g(v);
    return {gv / std::sqrt(2.0 * H), gv * gv / (2.0 * H) - nl_.dg(v)};
}

double transform_F(const Nonlinearity& nl, double v, double m) {
    return FTransform(nl, m).F(v);
}

double inverse_F(const Nonlinearity& nl, double w, double m) {
    return FTransform(nl, m).inverse(w);
}

double coefficient_b(const Nonlinearity& nl, double w, double m) {
    return FTransform(nl, m).b_of_w(w);
}

} // namespace largesol
