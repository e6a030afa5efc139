#ifndef MLWF_BASIS_MLS_HPP
#define MLWF_BASIS_MLS_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mlwf/grid.hpp"
#include "mlwf/shape.hpp"

namespace mlwf {

struct WeightValue {
    double w;   // weight
    double dw;  // derivative w.r.t. the distance argument
    double d2w; // second derivative w.r.t. the distance argument
};

/// Cubic spline weight on [0, rw]: 2/3 - 4r^2 + 4r^3 for r <= 1/2,
/// 4/3 - 4r + 4r^2 - 4/3 r^3 for 1/2 < r <= 1, zero beyond, with
/// r = d/rw. C2 in the distance, vanishing together with its first two
/// derivatives at d = rw.
inline WeightValue cubic_spline_weight(double d, double rw) {
    if (d < 0.0) throw std::invalid_argument("cubic_spline_weight: negative distance");
    if (!(rw > 0.0)) throw std::invalid_argument("cubic_spline_weight: radius must be > 0");
    const double r = d / rw;
    WeightValue v{0.0, 0.0, 0.0};
    if (r >= 1.0) return v;
    if (r <= 0.5) {
        v.w = 2.0 / 3.0 - 4.0 * r * r + 4.0 * r * r * r;
        v.dw = (-8.0 * r + 12.0 * r * r) / rw;
        v.d2w = (-8.0 + 24.0 * r) / (rw * rw);
    } else {
        // factored form of 4/3 - 4r + 4r^2 - 4/3 r^3: vanishes with both
        // derivatives exactly at the support edge
        const double omr = 1.0 - r;
        v.w = (4.0 / 3.0) * omr * omr * omr;
        v.dw = -4.0 * omr * omr / rw;
        v.d2w = 8.0 * omr / (rw * rw);
    }
    return v;
}

struct MlsConfig {
    double rw;                          // nominal support radius (x units)
    double det_rel_threshold = 1e-14;   // moment matrix accepted while |det| > thr * trace^2
};

/// Moving least squares with the linear basis {1, x} and cubic spline
/// weights on a uniform grid.
///
/// The weight support radius is snapped to the node lattice,
/// floor(rw/h)*h, so that the outermost node of a boundary window carries
/// an exactly zero weight. That makes the end-point shape functions exact
/// Kronecker deltas (the basis at x=0 degenerates to a two-point weighted
/// interpolation), which the boundary collocation rows and the stability
/// argument rely on.
class MlsBasis {
public:
    MlsBasis(const Grid& grid, MlsConfig cfg) : grid_(grid), cfg_(cfg) {
        if (!(cfg.rw > 0.0)) throw std::invalid_argument("MlsBasis: rw must be > 0");
        const int steps = static_cast<int>(std::floor(cfg.rw / grid.h + 1e-9));
        if (steps < 1) throw SupportError("MlsBasis: support radius below one grid spacing");
        rw_eff_ = steps * grid_.h;
    }

    double support_radius() const { return rw_eff_; }

    ShapeEval eval(double x) const {
        if (x < -1e-12 || x > 1.0 + 1e-12)
            throw std::invalid_argument("MlsBasis::eval: x = " + std::to_string(x) + " outside [0,1]");
        const double h = grid_.h;
        const int n_nodes = grid_.node_count();
        int j0 = static_cast<int>(std::ceil((x - rw_eff_) / h - 1e-9));
        int j1 = static_cast<int>(std::floor((x + rw_eff_) / h + 1e-9));
        j0 = std::max(j0, 0);
        j1 = std::min(j1, n_nodes - 1);
        const int n = j1 - j0 + 1;
        if (n < 3)
            throw SupportError("MLS support deficiency at x = " + std::to_string(x) + ": only " +
                               std::to_string(n) + " nodes in radius " + std::to_string(rw_eff_));

        // local coordinates about the window midpoint keep the 2x2 moment
        // matrix O(h^2)-scaled instead of near-singular
        const double c = 0.5 * (grid_.node(j0) + grid_.node(j1));

        std::vector<double> u(n), w(n), dw(n), d2w(n);
        double a00 = 0, a01 = 0, a11 = 0;
        double ax00 = 0, ax01 = 0, ax11 = 0;
        double axx00 = 0, axx01 = 0, axx11 = 0;
        for (int k = 0; k < n; ++k) {
            const double xk = grid_.node(j0 + k);
            u[k] = xk - c;
            const double diff = x - xk;
            const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
            const WeightValue wv = cubic_spline_weight(std::abs(diff), rw_eff_);
            w[k] = wv.w;
            dw[k] = wv.dw * sgn;
            d2w[k] = wv.d2w;
            a00 += w[k];
            a01 += w[k] * u[k];
            a11 += w[k] * u[k] * u[k];
            ax00 += dw[k];
            ax01 += dw[k] * u[k];
            ax11 += dw[k] * u[k] * u[k];
            axx00 += d2w[k];
            axx01 += d2w[k] * u[k];
            axx11 += d2w[k] * u[k] * u[k];
        }

        const double det = a00 * a11 - a01 * a01;
        const double tr = a00 + a11;
        if (!(std::abs(det) > cfg_.det_rel_threshold * tr * tr))
            throw SupportError("MLS moment matrix ill-conditioned at x = " + std::to_string(x) +
                               " (det = " + std::to_string(det) + ")");

        // inv = A^{-1}, invx = (A^{-1})_x, invxx = (A^{-1})_xx via
        //   (A^{-1})_x  = -A^{-1} A_x A^{-1}
        //   (A^{-1})_xx = -[(A^{-1})_x A_x A^{-1} + A^{-1} A_xx A^{-1} + A^{-1} A_x (A^{-1})_x]
        const double inv00 = a11 / det, inv01 = -a01 / det, inv11 = a00 / det;

        auto sym_mul = [](double s00, double s01, double s11, double t00, double t01, double t11,
                          double out[4]) {
            out[0] = s00 * t00 + s01 * t01;
            out[1] = s00 * t01 + s01 * t11;
            out[2] = s01 * t00 + s11 * t01;
            out[3] = s01 * t01 + s11 * t11;
        };
        // M = A^{-1} A_x, S = M A^{-1}  (S symmetric)
        double m[4];
        sym_mul(inv00, inv01, inv11, ax00, ax01, ax11, m);
        const double invx00 = -(m[0] * inv00 + m[1] * inv01);
        const double invx01 = -(m[0] * inv01 + m[1] * inv11);
        const double invx11 = -(m[2] * inv01 + m[3] * inv11);

        // T = A^{-1} A_xx A^{-1} (symmetric)
        double m2[4];
        sym_mul(inv00, inv01, inv11, axx00, axx01, axx11, m2);
        const double t00 = m2[0] * inv00 + m2[1] * inv01;
        const double t01 = m2[0] * inv01 + m2[1] * inv11;
        const double t11 = m2[2] * inv01 + m2[3] * inv11;

        // U = A^{-1} A_x (A^{-1})_x and its transpose-partner combine into
        // the first/last terms of the chain rule; both equal M * invx here.
        const double u00 = m[0] * invx00 + m[1] * invx01;
        const double u01 = m[0] * invx01 + m[1] * invx11;
        const double u10 = m[2] * invx00 + m[3] * invx01;
        const double u11v = m[2] * invx01 + m[3] * invx11;
        const double invxx00 = -(u00 + u00) - t00;           // (A^{-1})_x A_x A^{-1} = (A^{-1} A_x (A^{-1})_x)^T
        const double invxx01 = -(u01 + u10) - t01;
        const double invxx11 = -(u11v + u11v) - t11;

        // row vectors p^T A^{-1}-style with p = (1, x - c), p' = (0, 1)
        const double px = x - c;
        const double q0_0 = inv00 + px * inv01;
        const double q0_1 = inv01 + px * inv11;
        const double q1_0 = invx00 + px * invx01 + inv01;
        const double q1_1 = invx01 + px * invx11 + inv11;
        const double q2_0 = invxx00 + px * invxx01 + 2.0 * invx01;
        const double q2_1 = invxx01 + px * invxx11 + 2.0 * invx11;

        ShapeEval out;
        out.first_node = j0;
        out.phi.resize(n);
        out.dphi.resize(n);
        out.d2phi.resize(n);
        for (int k = 0; k < n; ++k) {
            const double b0 = q0_0 + q0_1 * u[k];
            const double b1 = q1_0 + q1_1 * u[k];
            const double b2 = q2_0 + q2_1 * u[k];
            out.phi[k] = w[k] * b0;
            out.dphi[k] = w[k] * b1 + dw[k] * b0;
            out.d2phi[k] = w[k] * b2 + 2.0 * dw[k] * b1 + d2w[k] * b0;
        }
        return out;
    }

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    MlsConfig cfg_;
    double rw_eff_ = 0.0;
};

} // namespace mlwf

#endif
