#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace largesol {

/// Solve a tridiagonal system in place. lower[i] couples row i to i-1,
/// upper[i] couples row i to i+1 (lower[0] and upper[n-1] unused).
inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

/// Dense LU with partial pivoting, row-major storage.
inline void lu_factor(double* a, int* piv, int n) {
    for (int k = 0; k < n; ++k) {
        int p = k;
        double amax = std::abs(a[k * n + k]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a[i * n + k]);
            if (v > amax) {
                amax = v;
                p = i;
            }
        }
        if (amax == 0.0) throw std::runtime_error("lu_factor: singular matrix");
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
        }
        const double pivinv = 1.0 / a[k * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double m = a[i * n + k] * pivinv;
            a[i * n + k] = m;
            if (m != 0.0) {
                const double* rk = a + k * n;
                double* ri = a + i * n;
                for (int j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
            }
        }
    }
}

inline void lu_solve(const double* a, const int* piv, int n, double* b) {
    for (int k = 0; k < n; ++k) {
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
        const double bk = b[k];
        if (bk != 0.0) {
            for (int i = k + 1; i < n; ++i) b[i] -= a[i * n + k] * bk;
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        const double* ri = a + i * n;
        for (int j = i + 1; j < n; ++j) s -= ri[j] * b[j];
        b[i] = s / ri[i];
    }
}

/// Block-tridiagonal factorization for polar-grid Jacobians.
///
/// Ring i carries a periodic-tridiagonal diagonal block
///   D_i = diag(main_i) + theta_off_i * (shift+1 + shift-1, periodic)
/// and scalar couplings lower_i (to ring i-1) and upper_i (to ring i+1).
/// Forward elimination makes the Schur complements S_i dense; their LU
/// factors are stored per ring, so a factorization can be reused across
/// several Newton steps with new right-hand sides.
class BlockRingSolver {
public:
    void factor(int n_rings, int n_theta,
                const std::vector<std::vector<double>>& main_diag,
                const std::vector<double>& theta_off,
                const std::vector<double>& lower,
                const std::vector<double>& upper) {
        nr_ = n_rings;
        nt_ = n_theta;
        lower_ = lower;
        upper_ = upper;
        const std::size_t nn = static_cast<std::size_t>(nt_) * nt_;
        lu_.assign(static_cast<std::size_t>(nr_) * nn, 0.0);
        piv_.assign(static_cast<std::size_t>(nr_) * nt_, 0);
        std::vector<double> sinv(nn);

        for (int i = 0; i < nr_; ++i) {
            double* s = &lu_[static_cast<std::size_t>(i) * nn];
            // Periodic tridiagonal block.
            std::fill(s, s + nn, 0.0);
            const double off = theta_off[i];
            for (int j = 0; j < nt_; ++j) {
                s[j * nt_ + j] = main_diag[i][j];
                s[j * nt_ + ((j + 1) % nt_)] += off;
                s[j * nt_ + ((j + nt_ - 1) % nt_)] += off;
            }
            if (i > 0) {
                // S_i = D_i - lower_i * upper_{i-1} * S_{i-1}^{-1}
                const double* lu_prev = &lu_[static_cast<std::size_t>(i - 1) * nn];
                const int* piv_prev = &piv_[static_cast<std::size_t>(i - 1) * nt_];
                const double c = lower_[i] * upper_[i - 1];
                if (c != 0.0) {
                    // Columns of S_{i-1}^{-1} via unit solves.
                    std::vector<double> col(nt_);
                    for (int j = 0; j < nt_; ++j) {
                        std::fill(col.begin(), col.end(), 0.0);
                        col[j] = 1.0;
                        lu_solve(lu_prev, piv_prev, nt_, col.data());
                        for (int r = 0; r < nt_; ++r) sinv[static_cast<std::size_t>(r) * nt_ + j] = col[r];
                    }
                    for (std::size_t q = 0; q < nn; ++q) s[q] -= c * sinv[q];
                }
            }
            lu_factor(s, &piv_[static_cast<std::size_t>(i) * nt_], nt_);
        }
        factored_ = true;
    }

    /// Solve in place; rhs is rings-major (ring i occupies [i*n_theta, (i+1)*n_theta)).
    void solve(std::vector<double>& rhs) const {
        if (!factored_) throw std::runtime_error("BlockRingSolver: not factored");
        const std::size_t nn = static_cast<std::size_t>(nt_) * nt_;
        std::vector<double> z(nt_);
        // Forward: yhat_i = b_i - lower_i * S_{i-1}^{-1} yhat_{i-1}
        for (int i = 1; i < nr_; ++i) {
            double* prev = &rhs[static_cast<std::size_t>(i - 1) * nt_];
            std::copy(prev, prev + nt_, z.begin());
            lu_solve(&lu_[static_cast<std::size_t>(i - 1) * nn],
                     &piv_[static_cast<std::size_t>(i - 1) * nt_], nt_, z.data());
            double* cur = &rhs[static_cast<std::size_t>(i) * nt_];
            const double li = lower_[i];
            for (int j = 0; j < nt_; ++j) cur[j] -= li * z[j];
        }
        // Backward: x_i = S_i^{-1}(yhat_i - upper_i x_{i+1})
        for (int i = nr_ - 1; i >= 0; --i) {
            double* cur = &rhs[static_cast<std::size_t>(i) * nt_];
            if (i + 1 < nr_) {
                const double* nxt = &rhs[static_cast<std::size_t>(i + 1) * nt_];
                const double ui = upper_[i];
                for (int j = 0; j < nt_; ++j) cur[j] -= ui * nxt[j];
            }
            lu_solve(&lu_[static_cast<std::size_t>(i) * nn],
                     &piv_[static_cast<std::size_t>(i) * nt_], nt_, cur);
        }
    }

    bool factored() const { return factored_; }

private:
    int nr_ = 0;
    int nt_ = 0;
    bool factored_ = false;
    std::vector<double> lu_;
    std::vector<int> piv_;
    std::vector<double> lower_, upper_;
};

} // namespace largesol
