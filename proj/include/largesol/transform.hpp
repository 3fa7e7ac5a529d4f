#pragma once

#include <limits>
#include <vector>

#include "largesol/nonlinearity.hpp"

namespace largesol {

/// The transform w = F(v) = int_v^inf (2 Htilde(s))^{-1/2} ds with
/// Htilde = G - G(m), defined for v >= m >= b_monotone and finite exactly
/// when the Keller-Osserman tail converges.
///
/// The constructor builds a cumulative table on a log-graded grid in
/// (v - m), with the inverse-square-root base singularity removed by the
/// substitution s = m + t^2 and the tail handled by a local power model
/// of the primitive. F, its inverse and the transformed coefficient
/// b(w) = g(v)/sqrt(2 Htilde(v)) are then table lookups polished by
/// Newton steps against the analytic derivative F'(v) = -(2 Htilde)^{-1/2}.
class FTransform {
public:
    struct Options {
        double v_cap = 0.0;          // table top; 0 -> 1e12 * max(1, m)
        double x_min_rel = 1e-14;    // first knot at m + x_min_rel * max(1, m)
        int pts_per_decade = 24;
        double ko_margin = 0.05;     // tail admissibility guard
    };

    FTransform(const Nonlinearity& nl, double m);
    FTransform(const Nonlinearity& nl, double m, Options opts);

    /// F(v); throws std::domain_error for v < m.
    double F(double v) const;

    /// v with F(v) = w to 1e-12 * (1 + w); throws std::out_of_range for
    /// w <= 0 or w above the supremum of F.
    double inverse(double w) const;

    /// b(w) = g(v)/sqrt(2 Htilde(v)) at v = inverse(w).
    double b_of_w(double w) const;

    /// db/dw = g(v)^2 / (2 Htilde(v)) - g'(v) at v = inverse(w).
    double db_dw(double w) const;

    struct BPair {
        double b;
        double db_dw;
    };

    /// b and db/dw sharing one inversion of w.
    BPair b_pair(double w) const;

    double htilde(double v) const;

    double base() const { return m_; }

    /// sup of F on (m, inf); +inf when g(m) = 0 makes the base integral diverge.
    double w_sup() const { return w_sup_; }

    /// Largest w the table can invert reliably.
    double w_table_top() const { return F_.front(); }

    double v_cap() const { return x_.back() + m_; }

    const Nonlinearity& nl() const { return nl_; }

private:
    double integrand(double x) const; // (2 Htilde(m + x))^{-1/2}
    double F_of_x(double x) const;
    double x_of_w(double w) const;

    Nonlinearity nl_;
    double m_ = 0.0;
    double w_sup_ = std::numeric_limits<double>::infinity();
    std::vector<double> x_;  // v - m knots, increasing
    std::vector<double> H_;  // Htilde at knots
    std::vector<double> F_;  // F at knots, decreasing
    double tail_p_ = 0.0;    // local exponent of Htilde at the table top
    double tail_F_ = 0.0;    // analytic remainder beyond the table top
};

/// Free-function forms of the transform operations. Each call builds a
/// table for (nl, m); solvers hold an FTransform instead.
double transform_F(const Nonlinearity& nl, double v, double m);
double inverse_F(const Nonlinearity& nl, double w, double m);
double coefficient_b(const Nonlinearity& nl, double w, double m);

} // namespace largesol
