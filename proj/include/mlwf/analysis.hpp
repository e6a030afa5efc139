#ifndef MLWF_ANALYSIS_HPP
#define MLWF_ANALYSIS_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlwf/assembly.hpp"
#include "mlwf/eig.hpp"
#include "mlwf/stepper.hpp"

namespace mlwf {

/// Sample-point error norms: max = discrete maximum norm, rms = the mean
/// square norm sqrt(sum d_i^2) / n (the 1/n prefactor sits outside the
/// root).
struct ErrorReport {
    double rms = 0.0;
    double max = 0.0;
};

inline ErrorReport error_metrics(const std::vector<double>& approx, const std::vector<double>& exact) {
    if (approx.size() != exact.size())
        throw std::invalid_argument("error_metrics: length mismatch");
    ErrorReport r;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        const double d = std::abs(approx[i] - exact[i]);
        r.max = std::max(r.max, d);
        sum_sq += d * d;
    }
    if (!approx.empty()) r.rms = std::sqrt(sum_sq) / static_cast<double>(approx.size());
    return r;
}

/// log2 improvement of the max error across one grid refinement.
inline double convergence_ratio(double previous_max, double current_max) {
    return std::log2(previous_max / current_max);
}

/// Per-eigenvalue growth factor of the theta scheme,
/// |theta dt lam + 1| / |(theta-1) dt lam + 1|.
inline double amplification_factor(std::complex<double> lambda, double theta, double dt) {
    const std::complex<double> num = theta * dt * lambda + 1.0;
    const std::complex<double> den = (theta - 1.0) * dt * lambda + 1.0;
    return std::abs(num) / std::abs(den);
}

struct StabilityReport {
    int upsilon_dim = 0;
    double max_real_part = 0.0;
    double amplification_bound = 0.0;
    double dt = 0.0;
    double theta = 0.0;
    std::vector<std::complex<double>> spectrum;

    bool stable() const { return amplification_bound <= 1.0 + 1e-10; }
};

/// Interior blocks feeding the stability matrix: the mass block and the
/// time-independent spatial block over the interior nodes.
struct StabilityBlocks {
    DenseMatrix mass;
    DenseMatrix spatial;
};

inline StabilityBlocks stability_blocks(const SchemeKernels& k) {
    const int offset = k.scheme == Scheme::lbie ? 1 : 0; // strip boundary rows/cols of the LBIE kernels
    const int n = k.scheme == Scheme::lbie ? k.dims - 2 : k.dims;
    StabilityBlocks b{DenseMatrix(n, n), DenseMatrix(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b.mass(i, j) = k.mass.at(i + offset, j + offset);
            b.spatial(i, j) = k.spatial.at(i + offset, j + offset);
        }
    return b;
}

/// Amplification matrix spectrum summary: forms the interior matrix
/// Upsilon by solving mass * Upsilon = spatial columnwise, takes its dense
/// spectrum and evaluates the theta-scheme growth factor on it. The scheme
/// is stable when no eigenvalue amplifies, i.e. the bound stays <= 1.
inline StabilityReport stability_from_kernels(const SchemeKernels& k, double dt, double theta) {
    const StabilityBlocks b = stability_blocks(k);
    const int n = b.mass.rows();
    const LuFactorization lu(b.mass);
    DenseMatrix upsilon(n, n);
    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = b.spatial(i, j);
        const std::vector<double> u = lu.solve(col);
        for (int i = 0; i < n; ++i) upsilon(i, j) = u[i];
    }

    StabilityReport rep;
    rep.upsilon_dim = n;
    rep.dt = dt;
    rep.theta = theta;
    rep.spectrum = eigenvalues_dense(upsilon);
    rep.max_real_part = -std::numeric_limits<double>::infinity();
    rep.amplification_bound = 0.0;
    for (const auto& lam : rep.spectrum) {
        rep.max_real_part = std::max(rep.max_real_part, lam.real());
        rep.amplification_bound = std::max(rep.amplification_bound, amplification_factor(lam, theta, dt));
    }
    return rep;
}

/// Diagnostic entry point matching the experiment conventions (dt = T/M).
inline StabilityReport stability_diagnostic(Scheme scheme, const ModelParams& p, int n_intervals,
                                            int steps, const NumericsConfig& cfg = {}) {
    if (n_intervals > 1024)
        throw std::invalid_argument("stability_diagnostic: dense eigensolve capped at N = 1024");
    p.validate();
    const Grid g = make_grid(n_intervals, cfg.rq_over_h, cfg.rw_over_rq);
    const SinhStretching map(p);
    SchemeKernels kernels;
    if (scheme == Scheme::lbie) {
        const MlsBasis basis(g, MlsConfig{g.r_w});
        kernels = lbie_kernels(g, basis, map, p.rate, cfg.quadrature);
    } else {
        const RpiBasis basis(g, RpiConfig{g.r_w});
        kernels = lrpi_kernels(g, basis, map, p.rate, cfg.quadrature);
    }
    const double dt = p.maturity / static_cast<double>(steps);
    return stability_from_kernels(kernels, dt, p.theta);
}

} // namespace mlwf

#endif
