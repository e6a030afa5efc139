#ifndef MLWF_QUADRATURE_HPP
#define MLWF_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlwf/grid.hpp"
#include "mlwf/shape.hpp"

namespace mlwf {

/// One assembled row of local integrals: coefficients against the nodes of
/// a contiguous column window around the sub-domain centre.
struct LocalRow {
    int first = 0;
    std::vector<double> coeff;

    double entry(int global_j) const {
        const int k = global_j - first;
        return (k >= 0 && k < static_cast<int>(coeff.size())) ? coeff[k] : 0.0;
    }

    void add(int global_j, double v) {
        const int k = global_j - first;
        if (k < 0 || k >= static_cast<int>(coeff.size()))
            throw std::out_of_range("LocalRow: contribution outside declared window");
        coeff[k] += v;
    }
};

/// Sub-domain integrals for the Heaviside-tested (LRPI) weak form:
///   volume     A_ij = int (alpha'' - beta') phi_j
///   mass       B_ij = int phi_j
///   edge_convection C_ij = [(beta - alpha') phi_j]  (right minus left)
///   edge_flux       D_ij = [alpha phi_j,x]          (right minus left)
struct LrpiRows {
    int center = 0;
    LocalRow volume, mass, edge_convection, edge_flux;
};

/// Sub-domain integrals for the fundamental-solution-tested (LBIE) weak
/// form; |x - x_i| and sgn(x - x_i) factors come from the test function.
///   volume    At_ij = 1/2 int [(alpha''-beta')|x-x_i| + (alpha'-beta) sgn(x-x_i)] phi_j
///   mass      Bt_ij = 1/2 int |x-x_i| phi_j
///   flux_sgn  Ct_ij = 1/2 int alpha sgn(x-x_i) phi_j,x
///   edge_convection Dt_ij = 1/2 [|x-x_i| (beta - alpha') phi_j]   (right minus left)
///   edge_flux       Et_ij = 1/2 [|x-x_i| alpha phi_j,x]           (right minus left)
///
/// The mass kernel needs the same 1/2 |x-x_i| test factor as the other
/// volume terms: without it the time term is weighted by the measure 2 r_q
/// against r_q^2/2 for the spatial terms and the scheme loses consistency.
struct LbieRows {
    int center = 0;
    LocalRow volume, mass, flux_sgn, edge_convection, edge_flux;
};

/// Composite Simpson resolution. Each half of the sub-domain is covered by
/// `panels_per_half` three-point panels, so kernels carrying |x-x_i| or
/// sgn(x-x_i) are integrated on intervals where they are smooth; sgn at the
/// centre is taken as the one-sided limit of the half being integrated.
struct QuadratureRule {
    int panels_per_half = 64;
};

namespace detail {

// Composite Simpson over [lo, hi]: callback(point, weight) for every
// abscissa. Exact for cubics at any resolution.
template <class F>
void simpson_points(double lo, double hi, int panels, F&& callback) {
    const int m = 2 * panels;
    const double w = (hi - lo) / static_cast<double>(m);
    for (int k = 0; k <= m; ++k) {
        const double x = (k == m) ? hi : lo + k * w;
        double sw;
        if (k == 0 || k == m) sw = w / 3.0;
        else if (k % 2 == 1) sw = 4.0 * w / 3.0;
        else sw = 2.0 * w / 3.0;
        callback(x, sw);
    }
}

} // namespace detail

/// Heaviside-form rows for interior node i.
/// `shape` maps an evaluation point to the ShapeEval to use for this
/// sub-domain; `co` provides alpha, alpha_d, alpha_dd, beta, beta_d.
template <class ShapeFn, class Coeffs>
LrpiRows lrpi_rows(const Grid& g, int i, ShapeFn&& shape, const Coeffs& co, int column_halfwidth,
                   const QuadratureRule& rule = {}) {
    if (i <= 0 || i >= g.n_intervals)
        throw std::invalid_argument("lrpi_rows: interior node required");
    if (rule.panels_per_half < 1) throw std::invalid_argument("lrpi_rows: need at least one panel");

    const double xi = g.node(i);
    const int first = std::max(0, i - column_halfwidth);
    const int last = std::min(g.node_count() - 1, i + column_halfwidth);
    LrpiRows rows;
    rows.center = i;
    for (LocalRow* r : {&rows.volume, &rows.mass, &rows.edge_convection, &rows.edge_flux}) {
        r->first = first;
        r->coeff.assign(static_cast<std::size_t>(last - first + 1), 0.0);
    }

    for (int half = 0; half < 2; ++half) {
        const double lo = half == 0 ? xi - g.r_q : xi;
        const double hi = half == 0 ? xi : xi + g.r_q;
        detail::simpson_points(lo, hi, rule.panels_per_half, [&](double x, double sw) {
            const ShapeEval se = shape(x);
            const double drift = co.alpha_dd(x) - co.beta_d(x);
            for (int k = 0; k < se.size(); ++k) {
                const int j = se.support(k);
                rows.volume.add(j, sw * drift * se.phi[k]);
                rows.mass.add(j, sw * se.phi[k]);
            }
        });
    }

    // boundary terms of the sub-domain, right end minus left end
    for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? xi - g.r_q : xi + g.r_q;
        const double orient = side == 0 ? -1.0 : 1.0;
        const ShapeEval se = shape(x);
        const double conv = co.beta(x) - co.alpha_d(x);
        const double diff = co.alpha(x);
        for (int k = 0; k < se.size(); ++k) {
            const int j = se.support(k);
            rows.edge_convection.add(j, orient * conv * se.phi[k]);
            rows.edge_flux.add(j, orient * diff * se.dphi[k]);
        }
    }
    return rows;
}

/// Fundamental-solution-form rows for interior node i.
template <class ShapeFn, class Coeffs>
LbieRows lbie_rows(const Grid& g, int i, ShapeFn&& shape, const Coeffs& co, int column_halfwidth,
                   const QuadratureRule& rule = {}) {
    if (i <= 0 || i >= g.n_intervals)
        throw std::invalid_argument("lbie_rows: interior node required");
    if (rule.panels_per_half < 1) throw std::invalid_argument("lbie_rows: need at least one panel");

    const double xi = g.node(i);
    const int first = std::max(0, i - column_halfwidth);
    const int last = std::min(g.node_count() - 1, i + column_halfwidth);
    LbieRows rows;
    rows.center = i;
    for (LocalRow* r : {&rows.volume, &rows.mass, &rows.flux_sgn, &rows.edge_convection, &rows.edge_flux}) {
        r->first = first;
        r->coeff.assign(static_cast<std::size_t>(last - first + 1), 0.0);
    }

    for (int half = 0; half < 2; ++half) {
        const double lo = half == 0 ? xi - g.r_q : xi;
        const double hi = half == 0 ? xi : xi + g.r_q;
        const double sgn = half == 0 ? -1.0 : 1.0; // one-sided limit at the centre
        detail::simpson_points(lo, hi, rule.panels_per_half, [&](double x, double sw) {
            const ShapeEval se = shape(x);
            const double dist = std::abs(x - xi);
            const double kern = 0.5 * ((co.alpha_dd(x) - co.beta_d(x)) * dist +
                                       (co.alpha_d(x) - co.beta(x)) * sgn);
            const double flux = 0.5 * co.alpha(x) * sgn;
            for (int k = 0; k < se.size(); ++k) {
                const int j = se.support(k);
                rows.volume.add(j, sw * kern * se.phi[k]);
                rows.mass.add(j, sw * 0.5 * dist * se.phi[k]);
                rows.flux_sgn.add(j, sw * flux * se.dphi[k]);
            }
        });
    }

    for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? xi - g.r_q : xi + g.r_q;
        const double orient = side == 0 ? -1.0 : 1.0;
        const ShapeEval se = shape(x);
        const double conv = 0.5 * g.r_q * (co.beta(x) - co.alpha_d(x)); // |x - x_i| = r_q at both ends
        const double diff = 0.5 * g.r_q * co.alpha(x);
        for (int k = 0; k < se.size(); ++k) {
            const int j = se.support(k);
            rows.edge_convection.add(j, orient * conv * se.phi[k]);
            rows.edge_flux.add(j, orient * diff * se.dphi[k]);
        }
    }
    return rows;
}

} // namespace mlwf

#endif
