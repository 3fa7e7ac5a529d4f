#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace largesol {

/// Monotone piecewise-cubic interpolant (Fritsch-Carlson slope limiting).
/// Preserves monotonicity of the data, C1, exact on the knots.
class PchipInterpolant {
public:
    PchipInterpolant() = default;

    PchipInterpolant(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) {
            throw std::invalid_argument("PchipInterpolant: need >= 2 knots");
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (!(x_[i] > x_[i - 1])) {
                throw std::invalid_argument("PchipInterpolant: abscissae must increase");
            }
        }
        m_.assign(n, 0.0);
        std::vector<double> d(n - 1), h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Endpoint slopes limited to keep the first/last panel monotone.
        for (std::size_t e : {std::size_t{0}, n - 1}) {
            const double del = (e == 0) ? d[0] : d[n - 2];
            if (del == 0.0) {
                m_[e] = 0.0;
            } else if (m_[e] / del < 0.0) {
                m_[e] = 0.0;
            } else if (std::abs(m_[e]) > 3.0 * std::abs(del)) {
                m_[e] = 3.0 * del;
            }
        }
    }

    double operator()(double x) const { return eval(x); }

    double eval(double x) const {
        const auto [i, t, h] = locate(x);
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double derivative(double x) const {
        const auto [i, t, h] = locate(x);
        const double g00 = 6 * t * (t - 1);
        const double g10 = (1 - t) * (1 - 3 * t);
        const double g01 = -g00;
        const double g11 = t * (3 * t - 2);
        return (g00 * y_[i] + g01 * y_[i + 1]) / h + g10 * m_[i] + g11 * m_[i + 1];
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    struct Cell {
        std::size_t i;
        double t;
        double h;
    };

    Cell locate(double x) const {
        // Linear extrapolation outside the table is the callers' contract.
        std::size_t i;
        if (x <= x_.front()) {
            i = 0;
        } else if (x >= x_.back()) {
            i = x_.size() - 2;
        } else {
            i = static_cast<std::size_t>(
                    std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        }
        const double h = x_[i + 1] - x_[i];
        return {i, (x - x_[i]) / h, h};
    }

    std::vector<double> x_, y_, m_;
};

/// Uniform Catmull-Rom weight evaluation for bicubic resampling.
/// t in [0,1] between samples p1 and p2.
inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    const double c = -0.5 * p0 + 0.5 * p2;
    return ((a * t + b) * t + c) * t + p1;
}

} // namespace largesol
