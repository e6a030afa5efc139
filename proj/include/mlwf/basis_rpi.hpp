#ifndef MLWF_BASIS_RPI_HPP
#define MLWF_BASIS_RPI_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlwf/grid.hpp"
#include "mlwf/linalg.hpp"
#include "mlwf/shape.hpp"

namespace mlwf {

struct RbfValue {
    double v;   // R
    double dv;  // dR/dd
    double d2v; // d2R/dd2
};

/// Wu's C4 compactly supported radial function
///   R(r) = (1-r)^6_+ (6 + 36 r + 82 r^2 + 72 r^3 + 30 r^4 + 5 r^5),
/// r = d/rw. No shape parameter; R, R' and R'' all vanish at d >= rw.
inline RbfValue wu_csrbf(double d, double rw) {
    if (d < 0.0) throw std::invalid_argument("wu_csrbf: negative distance");
    if (!(rw > 0.0)) throw std::invalid_argument("wu_csrbf: radius must be > 0");
    const double r = d / rw;
    RbfValue out{0.0, 0.0, 0.0};
    if (r >= 1.0) return out;
    const double omr = 1.0 - r;
    const double u = std::pow(omr, 6);
    const double up = -6.0 * std::pow(omr, 5);
    const double upp = 30.0 * std::pow(omr, 4);
    const double v = 6.0 + r * (36.0 + r * (82.0 + r * (72.0 + r * (30.0 + 5.0 * r))));
    const double vp = 36.0 + r * (164.0 + r * (216.0 + r * (120.0 + 25.0 * r)));
    const double vpp = 164.0 + r * (432.0 + r * (360.0 + 100.0 * r));
    out.v = u * v;
    out.dv = (up * v + u * vp) / rw;
    out.d2v = (upp * v + 2.0 * up * vp + u * vpp) / (rw * rw);
    return out;
}

struct RpiConfig {
    double rw; // support radius for the radial functions (x units)
};

/// Radial point interpolation: Wu CS-RBFs centred at the grid nodes inside
/// the support radius, augmented with the constant and linear monomials.
/// The resulting shape functions interpolate (Kronecker property), so
/// nodal coefficients are the physical nodal values.
///
/// On a uniform grid every support window of a given size has the same
/// interpolation matrix, so one LU factorization per window size is
/// prepared up front; eval() is const and safe to call concurrently.
class RpiBasis {
public:
    RpiBasis(const Grid& grid, RpiConfig cfg) : grid_(grid), cfg_(cfg) {
        if (!(cfg.rw > 0.0)) throw std::invalid_argument("RpiBasis: rw must be > 0");
        max_window_ = 2 * static_cast<int>(std::floor(cfg_.rw / grid_.h + 1e-9)) + 1;
        factors_.resize(max_window_ + 1);
        for (int n = 2; n <= max_window_; ++n) factors_[n] = make_factor(n);
    }

    double support_radius() const { return cfg_.rw; }

    /// Centres chosen by the support radius around x.
    ShapeEval eval(double x) const {
        if (x < -1e-12 || x > 1.0 + 1e-12)
            throw std::invalid_argument("RpiBasis::eval: x = " + std::to_string(x) + " outside [0,1]");
        const double h = grid_.h;
        int j0 = static_cast<int>(std::ceil((x - cfg_.rw) / h - 1e-9));
        int j1 = static_cast<int>(std::floor((x + cfg_.rw) / h + 1e-9));
        j0 = std::max(j0, 0);
        j1 = std::min(j1, grid_.node_count() - 1);
        return eval_in_window(x, j0, j1 - j0 + 1);
    }

    /// Interpolation against a fixed centre window. Row quadrature uses one
    /// window per sub-domain so the integrand stays smooth in x; the
    /// radius-based window would swap centres mid-interval.
    ShapeEval eval_in_window(double x, int first, int count) const {
        const int n = count;
        if (n < 2 || first < 0 || first + n > grid_.node_count())
            throw SupportError("RPI support deficiency at x = " + std::to_string(x) + ": window [" +
                               std::to_string(first) + ", " + std::to_string(first + n - 1) +
                               "] of " + std::to_string(n) + " centres");
        if (n >= static_cast<int>(factors_.size()) || !factors_[n])
            throw SupportError("RPI window of " + std::to_string(n) +
                               " centres exceeds the prepared factorizations");
        const LuFactorization& lu = *factors_[n];
        const double c = 0.5 * (grid_.node(first) + grid_.node(first + n - 1));

        std::vector<double> psi(n + 2, 0.0), dpsi(n + 2, 0.0), d2psi(n + 2, 0.0);
        for (int k = 0; k < n; ++k) {
            const double diff = x - grid_.node(first + k);
            const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            const RbfValue rv = wu_csrbf(std::abs(diff), cfg_.rw);
            psi[k] = rv.v;
            dpsi[k] = rv.dv * sgn;
            d2psi[k] = rv.d2v;
        }
        psi[n] = 1.0;
        psi[n + 1] = x - c;
        dpsi[n + 1] = 1.0;

        const std::vector<double> z0 = lu.solve(psi);
        const std::vector<double> z1 = lu.solve(dpsi);
        const std::vector<double> z2 = lu.solve(d2psi);

        ShapeEval out;
        out.first_node = first;
        out.phi.assign(z0.begin(), z0.begin() + n);
        out.dphi.assign(z1.begin(), z1.begin() + n);
        out.d2phi.assign(z2.begin(), z2.begin() + n);
        return out;
    }

    const Grid& grid() const { return grid_; }

private:
    // Interpolation matrix for a window of n consecutive nodes; identical
    // for every window of that size, up to the translation absorbed by the
    // local monomial shift.
    std::unique_ptr<LuFactorization> make_factor(int n) const {
        const double h = grid_.h;
        const double mid = 0.5 * (n - 1);
        DenseMatrix g(n + 2, n + 2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                g(i, j) = wu_csrbf(std::abs(i - j) * h, cfg_.rw).v;
            g(i, n) = 1.0;
            g(n, i) = 1.0;
            g(i, n + 1) = (i - mid) * h;
            g(n + 1, i) = (i - mid) * h;
        }
        try {
            return std::make_unique<LuFactorization>(g);
        } catch (const std::runtime_error&) {
            throw SupportError("RPI interpolation matrix singular for a window of " +
                               std::to_string(n) + " centres, spacing " + std::to_string(h) +
                               ", radius " + std::to_string(cfg_.rw));
        }
    }

    Grid grid_;
    RpiConfig cfg_;
    int max_window_ = 0;
    std::vector<std::unique_ptr<LuFactorization>> factors_;
};

} // namespace mlwf

#endif
