#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace largesol {

/// 15-point Gauss-Legendre rule on [a, b]. Exact for polynomials of degree 29;
/// the workhorse for the smooth positive integrands in this library.
template <typename F>
double gauss_legendre_15(F&& f, double a, double b) {
    // Abscissae/weights for [-1, 1], symmetric.
    static const double xg[8] = {
        0.0000000000000000, 0.2011940939974345, 0.3941513470775634,
        0.5709721726085388, 0.7244177313601700, 0.8482065834104272,
        0.9372733924007059, 0.9879925180204854};
    static const double wg[8] = {
        0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
        0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
        0.0703660474881081, 0.0307532419961173};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = wg[0] * f(c);
    for (int k = 1; k < 8; ++k) {
        const double dx = h * xg[k];
        s += wg[k] * (f(c + dx) + f(c - dx));
    }
    return s * h;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with mixed relative/absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-10,
                        double abs_tol = 1e-300, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace largesol
