#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace largesol {

/// Result of a 1D least-squares line fit y = slope*x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_fit: need two samples of equal length");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) {
        throw std::invalid_argument("linear_fit: degenerate abscissae");
    }
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

} // namespace largesol
