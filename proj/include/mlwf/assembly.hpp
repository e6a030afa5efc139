#ifndef MLWF_ASSEMBLY_HPP
#define MLWF_ASSEMBLY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlwf/banded.hpp"
#include "mlwf/basis_mls.hpp"
#include "mlwf/basis_rpi.hpp"
#include "mlwf/grid.hpp"
#include "mlwf/quadrature.hpp"

namespace mlwf {

enum class Scheme { lbie, lrpi };

inline const char* scheme_name(Scheme s) { return s == Scheme::lbie ? "LBIE" : "LRPI"; }

/// Column reach of an assembled row: nodes whose basis functions touch the
/// sub-domain [x_i - r_q, x_i + r_q].
inline int band_halfwidth(const Grid& g, double support_radius) {
    return static_cast<int>(std::floor((support_radius + g.r_q) / g.h + 1e-9));
}

/// Time-independent building blocks of one scheme on one grid:
///   spatial: S with rows  S_i = A - r B - C + D + E   (tilde kernels, LBIE)
///                         S_i = A - r B + C + D       (plain kernels, LRPI)
///   mass:    B rows.
/// The theta-weighted pair is then  left = (theta-1) S + (1/dt) B  and
/// right = theta S + (1/dt) B, plus boundary treatment.
struct SchemeKernels {
    Scheme scheme = Scheme::lbie;
    int dims = 0; // N+1 for LBIE, N-1 for LRPI
    BandedMatrix spatial;
    BandedMatrix mass;
    // LRPI: contributions of the eliminated boundary nodes to interior rows
    std::vector<double> spatial_col_first, mass_col_first;
    std::vector<double> spatial_col_last, mass_col_last;
    // LBIE: boundary collocation rows
    ShapeEval colloc_left, colloc_right;
};

template <class Coeffs>
SchemeKernels lbie_kernels(const Grid& g, const MlsBasis& basis, const Coeffs& co, double rate,
                           const QuadratureRule& rule = {}) {
    const int n = g.node_count();
    const int hb = band_halfwidth(g, basis.support_radius());
    SchemeKernels k;
    k.scheme = Scheme::lbie;
    k.dims = n;
    k.spatial = BandedMatrix(n, hb);
    k.mass = BandedMatrix(n, hb);
    auto shape = [&](double x) { return basis.eval(x); };
    for (int i = 1; i < n - 1; ++i) {
        const LbieRows rows = lbie_rows(g, i, shape, co, hb, rule);
        const int first = rows.mass.first;
        for (int j = first; j < first + static_cast<int>(rows.mass.coeff.size()); ++j) {
            const double b = rows.mass.entry(j);
            const double s = rows.volume.entry(j) - rate * b - rows.flux_sgn.entry(j) +
                             rows.edge_convection.entry(j) + rows.edge_flux.entry(j);
            if (s != 0.0) k.spatial.ref(i, j) = s;
            if (b != 0.0) k.mass.ref(i, j) = b;
        }
    }
    k.colloc_left = basis.eval(0.0);
    k.colloc_right = basis.eval(1.0);
    return k;
}

/// Production LRPI row for interior node i. Volume integrals run over a
/// fixed centre window per sub-domain (a radius-chosen set would swap
/// centres mid-interval and the integrand would jump). The edge terms use
/// radius-chosen centres; the flux factor phi_j,x at x_i +- r_q is
/// extrapolated from the two mid-interval points, where the centre stencil
/// is symmetric about the evaluation point -- evaluated directly at the
/// skewed sub-domain ends, the interpolant derivative carries an O(h)
/// error that does not vanish relative to the flux difference.
template <class Coeffs>
LrpiRows lrpi_production_row(const Grid& g, int i, const RpiBasis& basis, const Coeffs& co,
                             int column_halfwidth, const QuadratureRule& rule = {}) {
    const int last_node = g.node_count() - 1;
    const int kw = static_cast<int>(std::floor(basis.support_radius() / g.h + 1e-9));
    const int w0 = std::max(0, i - kw);
    const int w1 = std::min(last_node, i + kw);
    auto fixed = [&](double x) { return basis.eval_in_window(x, w0, w1 - w0 + 1); };
    LrpiRows rows = lrpi_rows(g, i, fixed, co, column_halfwidth, rule);

    std::fill(rows.edge_convection.coeff.begin(), rows.edge_convection.coeff.end(), 0.0);
    std::fill(rows.edge_flux.coeff.begin(), rows.edge_flux.coeff.end(), 0.0);
    const double xi = g.node(i);
    for (int side = 0; side < 2; ++side) {
        const double orient = side == 0 ? -1.0 : 1.0;
        const double x = xi + orient * g.r_q;
        const ShapeEval sv = basis.eval(x);
        const double conv = co.beta(x) - co.alpha_d(x);
        for (int q = 0; q < sv.size(); ++q)
            rows.edge_convection.add(sv.support(q), orient * conv * sv.phi[q]);

        const double near = xi + orient * 0.5 * g.h;
        const double far = xi - orient * 0.5 * g.h;
        const double t = (x - near) / (near - far); // 0.01 for r_q = 0.51 h
        const ShapeEval s_near = basis.eval(near);
        const ShapeEval s_far = basis.eval(far);
        const double diff = co.alpha(x);
        for (int q = 0; q < s_near.size(); ++q)
            rows.edge_flux.add(s_near.support(q), orient * diff * (1.0 + t) * s_near.dphi[q]);
        for (int q = 0; q < s_far.size(); ++q)
            rows.edge_flux.add(s_far.support(q), orient * diff * (-t) * s_far.dphi[q]);
    }
    return rows;
}

template <class Coeffs>
SchemeKernels lrpi_kernels(const Grid& g, const RpiBasis& basis, const Coeffs& co, double rate,
                           const QuadratureRule& rule = {}) {
    const int n_big = g.node_count();
    const int last_node = n_big - 1;
    const int dims = n_big - 2;
    const int hb = band_halfwidth(g, basis.support_radius());
    SchemeKernels k;
    k.scheme = Scheme::lrpi;
    k.dims = dims;
    k.spatial = BandedMatrix(dims, hb);
    k.mass = BandedMatrix(dims, hb);
    k.spatial_col_first.assign(dims, 0.0);
    k.mass_col_first.assign(dims, 0.0);
    k.spatial_col_last.assign(dims, 0.0);
    k.mass_col_last.assign(dims, 0.0);
    for (int i = 1; i <= last_node - 1; ++i) {
        const LrpiRows rows = lrpi_production_row(g, i, basis, co, hb, rule);
        const int first = rows.mass.first;
        for (int j = first; j < first + static_cast<int>(rows.mass.coeff.size()); ++j) {
            const double b = rows.mass.entry(j);
            const double s = rows.volume.entry(j) - rate * b + rows.edge_convection.entry(j) +
                             rows.edge_flux.entry(j);
            if (j == 0) {
                k.spatial_col_first[i - 1] = s;
                k.mass_col_first[i - 1] = b;
            } else if (j == last_node) {
                k.spatial_col_last[i - 1] = s;
                k.mass_col_last[i - 1] = b;
            } else {
                if (s != 0.0) k.spatial.ref(i - 1, j - 1) = s;
                if (b != 0.0) k.mass.ref(i - 1, j - 1) = b;
            }
        }
    }
    return k;
}

/// Known boundary data entering one backward step: values at the current
/// (unknown) time level and at the previous (known) level.
struct BoundaryValues {
    double left_now = 0.0;
    double left_prev = 0.0;
    double right_now = 0.0;
    double right_prev = 0.0;
};

/// One theta-weighted time-stepping system: left * u^k = right * u^{k+1} +
/// boundary data. LBIE keeps boundary nodes among the unknowns and imposes
/// the boundary by collocation rows; LRPI eliminates them and folds the
/// known values into the right-hand side.
struct AssembledSystem {
    Scheme scheme = Scheme::lbie;
    int dims = 0;
    double dt = 0.0;
    double theta = 0.5;
    BandedMatrix left;
    BandedMatrix right;
    std::vector<double> left_col_first, right_col_first; // LRPI folding data
    std::vector<double> left_col_last, right_col_last;

    /// LBIE boundary vector [bc_left 0 ... 0 bc_right].
    std::vector<double> boundary_vector(double bc_left, double bc_right) const {
        if (scheme != Scheme::lbie)
            throw std::logic_error("boundary_vector: only the LBIE system carries one");
        std::vector<double> h(dims, 0.0);
        h.front() = bc_left;
        h.back() = bc_right;
        return h;
    }

    std::vector<double> step_rhs(const std::vector<double>& prev, const BoundaryValues& bc) const {
        std::vector<double> rhs = band_matvec(right, prev);
        if (scheme == Scheme::lbie) {
            rhs.front() += bc.left_now;
            rhs.back() += bc.right_now;
        } else {
            for (int i = 0; i < dims; ++i)
                rhs[i] += right_col_first[i] * bc.left_prev - left_col_first[i] * bc.left_now +
                          right_col_last[i] * bc.right_prev - left_col_last[i] * bc.right_now;
        }
        return rhs;
    }
};

inline AssembledSystem make_system(const SchemeKernels& k, double dt, double theta) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_system: dt must be > 0");
    const double wl = theta - 1.0;
    const double wr = theta;
    const double inv_dt = 1.0 / dt;
    const int n = k.dims;
    const int hb = k.spatial.half_bandwidth();

    AssembledSystem sys;
    sys.scheme = k.scheme;
    sys.dims = n;
    sys.dt = dt;
    sys.theta = theta;
    sys.left = BandedMatrix(n, hb);
    sys.right = BandedMatrix(n, hb);
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - hb); j <= std::min(n - 1, i + hb); ++j) {
            const double s = k.spatial.at(i, j);
            const double b = k.mass.at(i, j);
            if (s == 0.0 && b == 0.0) continue;
            sys.left.ref(i, j) = wl * s + inv_dt * b;
            sys.right.ref(i, j) = wr * s + inv_dt * b;
        }
    }
    if (k.scheme == Scheme::lbie) {
        // collocation rows impose the boundary values on the unknown level;
        // the matching rows of the right matrix stay zero
        sys.left.zero_row(0);
        sys.left.zero_row(n - 1);
        for (int q = 0; q < k.colloc_left.size(); ++q)
            sys.left.ref(0, k.colloc_left.support(q)) = k.colloc_left.phi[q];
        for (int q = 0; q < k.colloc_right.size(); ++q)
            sys.left.ref(n - 1, k.colloc_right.support(q)) = k.colloc_right.phi[q];
    } else {
        sys.left_col_first.resize(n);
        sys.right_col_first.resize(n);
        sys.left_col_last.resize(n);
        sys.right_col_last.resize(n);
        for (int i = 0; i < n; ++i) {
            sys.left_col_first[i] = wl * k.spatial_col_first[i] + inv_dt * k.mass_col_first[i];
            sys.right_col_first[i] = wr * k.spatial_col_first[i] + inv_dt * k.mass_col_first[i];
            sys.left_col_last[i] = wl * k.spatial_col_last[i] + inv_dt * k.mass_col_last[i];
            sys.right_col_last[i] = wr * k.spatial_col_last[i] + inv_dt * k.mass_col_last[i];
        }
    }
    return sys;
}

/// phi_j(x_i) over all nodes: maps fictitious MLS coefficients to physical
/// nodal values, and fits nodal data by collocation when solved.
inline BandedMatrix mls_collocation_matrix(const Grid& g, const MlsBasis& basis) {
    const int n = g.node_count();
    BandedMatrix phi(n, band_halfwidth(g, basis.support_radius()));
    for (int i = 0; i < n; ++i) {
        const ShapeEval se = basis.eval(g.node(i));
        for (int q = 0; q < se.size(); ++q)
            if (se.phi[q] != 0.0) phi.ref(i, se.support(q)) = se.phi[q];
    }
    return phi;
}

} // namespace mlwf

#endif
