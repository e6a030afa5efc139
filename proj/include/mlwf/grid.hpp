#ifndef MLWF_GRID_HPP
#define MLWF_GRID_HPP

#include <stdexcept>
#include <vector>

namespace mlwf {

/// Uniform node layout on [0,1]: N+1 nodes, spacing h = 1/N, a local
/// integration radius r_q per node and a basis support radius r_w.
struct Grid {
    int n_intervals = 0; // N
    double h = 0.0;
    double r_q = 0.0;
    double r_w = 0.0;

    int node_count() const { return n_intervals + 1; }
    double node(int j) const { return static_cast<double>(j) * h; }

    std::vector<double> nodes() const {
        std::vector<double> xs(node_count());
        for (int j = 0; j < node_count(); ++j) xs[j] = node(j);
        return xs;
    }
};

/// Default radii: r_q = 0.51 h (neighbouring sub-domains overlap slightly)
/// and r_w = 4 r_q.
inline Grid make_grid(int n_intervals, double rq_over_h = 0.51, double rw_over_rq = 4.0) {
    if (n_intervals < 4) throw std::invalid_argument("make_grid: need at least 4 intervals");
    if (!(rq_over_h > 0.5)) throw std::invalid_argument("make_grid: sub-domains must cover the domain (r_q > h/2)");
    Grid g;
    g.n_intervals = n_intervals;
    g.h = 1.0 / static_cast<double>(n_intervals);
    g.r_q = rq_over_h * g.h;
    g.r_w = rw_over_rq * g.r_q;
    return g;
}

} // namespace mlwf

#endif
