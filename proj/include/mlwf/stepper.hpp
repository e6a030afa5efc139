#ifndef MLWF_STEPPER_HPP
#define MLWF_STEPPER_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlwf/assembly.hpp"
#include "mlwf/linalg.hpp"
#include "mlwf/model.hpp"
#include "mlwf/transform.hpp"

namespace mlwf {

struct TimeScheme {
    double theta = 0.5;
    int steps = 1;
    double dt = 0.0;
};

inline TimeScheme make_time_scheme(double theta, int steps, double maturity) {
    if (steps < 1) throw std::invalid_argument("make_time_scheme: steps must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("make_time_scheme: theta outside [0,1]");
    return TimeScheme{theta, steps, maturity / static_cast<double>(steps)};
}

struct NumericsConfig {
    double rq_over_h = 0.51;
    double rw_over_rq = 4.0;
    QuadratureRule quadrature{};
    SolverConfig solver{};
};

/// Solution of one pricing run at t = 0, carried together with the basis so
/// it can be evaluated anywhere in [0, s_max]. For LBIE the coefficients
/// are the fictitious values of the MLS expansion, for LRPI they are the
/// physical nodal values (Kronecker basis) with boundary values attached.
struct PriceSurface {
    Scheme scheme = Scheme::lbie;
    std::vector<double> coefficients;
    std::vector<double> nodal;
    int max_solver_iterations = 0;
    std::shared_ptr<const SinhStretching> map;
    std::shared_ptr<const MlsBasis> mls;
    std::shared_ptr<const RpiBasis> rpi;

    double value_at_x(double x) const {
        const ShapeEval se = mls ? mls->eval(x) : rpi->eval(x);
        return se.expand(coefficients);
    }

    double value_at_s(double s) const { return value_at_x(map->x_of_s(s)); }

    std::vector<double> values_at_s(const std::vector<double>& s_points) const {
        std::vector<double> out(s_points.size());
        for (std::size_t i = 0; i < s_points.size(); ++i) out[i] = value_at_s(s_points[i]);
        return out;
    }
};

/// Backward theta-weighted marching from the payoff. Assembles each scheme
/// once per (grid, dt, theta) and reuses the matrices across all steps;
/// only the boundary data changes between steps.
class PricingEngine {
public:
    PricingEngine(Scheme scheme, const ModelParams& params, int n_intervals, NumericsConfig cfg = {})
        : scheme_(scheme), params_(params), cfg_(cfg) {
        params.validate();
        grid_ = make_grid(n_intervals, cfg.rq_over_h, cfg.rw_over_rq);
        map_ = std::make_shared<SinhStretching>(params);
        payoff_nodal_.resize(grid_.node_count());
        for (int j = 0; j < grid_.node_count(); ++j)
            payoff_nodal_[j] = put_payoff(map_->s_of_x(grid_.node(j)), params.strike);

        if (scheme == Scheme::lbie) {
            mls_ = std::make_shared<MlsBasis>(grid_, MlsConfig{grid_.r_w});
            kernels_ = lbie_kernels(grid_, *mls_, *map_, params.rate, cfg.quadrature);
            collocation_ = mls_collocation_matrix(grid_, *mls_);
            colloc_precond_ = std::make_unique<BandedFactorization>(collocation_);
            // fictitious payoff coefficients: fit the transformed payoff
            // through the collocation system once
            payoff_state_ =
                solve_tracked(collocation_, payoff_nodal_, colloc_precond_.get(), "payoff collocation");
        } else {
            rpi_ = std::make_shared<RpiBasis>(grid_, RpiConfig{grid_.r_w});
            kernels_ = lrpi_kernels(grid_, *rpi_, *map_, params.rate, cfg.quadrature);
            payoff_state_.assign(payoff_nodal_.begin() + 1, payoff_nodal_.end() - 1);
        }
    }

    const Grid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    Scheme scheme() const { return scheme_; }
    const SinhStretching& stretching() const { return *map_; }
    const std::vector<double>& payoff_nodal() const { return payoff_nodal_; }
    /// Payoff in the marching state space (fictitious for LBIE, interior
    /// nodal for LRPI); also the constraint vector of the Bermudan loop.
    const std::vector<double>& payoff_state() const { return payoff_state_; }
    const SchemeKernels& kernels() const { return kernels_; }

    PriceSurface price_european(int steps) const { return march(steps, false); }

    PriceSurface price_bermudan(int steps) const { return march(steps, true); }

    /// Two-point extrapolation 2 V_{2M} - V_M of Bermudan prices, cancelling
    /// the leading O(1/M) term.
    PriceSurface price_american_richardson(int steps) const {
        const PriceSurface coarse = price_bermudan(steps);
        PriceSurface fine = price_bermudan(2 * steps);
        for (std::size_t i = 0; i < fine.coefficients.size(); ++i)
            fine.coefficients[i] = 2.0 * fine.coefficients[i] - coarse.coefficients[i];
        for (std::size_t i = 0; i < fine.nodal.size(); ++i)
            fine.nodal[i] = 2.0 * fine.nodal[i] - coarse.nodal[i];
        fine.max_solver_iterations = std::max(fine.max_solver_iterations, coarse.max_solver_iterations);
        return fine;
    }

private:
    std::vector<double> solve_tracked(const BandedMatrix& a, const std::vector<double>& b,
                                      const BandedFactorization* precond,
                                      const std::string& context) const {
        try {
            BicgstabResult r = bicgstab(a, b, cfg_.solver, precond);
            max_iterations_seen_ = std::max(max_iterations_seen_, r.iterations);
            return std::move(r.x);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (" + context + ")", e.residual, e.iterations);
        }
    }

    double boundary_left(double t, bool american) const {
        // put at s = 0: discounted strike for the European problem, the
        // strike itself under the early-exercise constraint
        return american ? params_.strike
                        : params_.strike * std::exp(-params_.rate * (params_.maturity - t));
    }

    PriceSurface march(int steps, bool constrained) const {
        const TimeScheme ts = make_time_scheme(params_.theta, steps, params_.maturity);
        const AssembledSystem sys = make_system(kernels_, ts.dt, ts.theta);
        const BandedFactorization precond(sys.left);

        std::vector<double> state = payoff_state_;
        for (int k = steps - 1; k >= 0; --k) {
            BoundaryValues bc;
            bc.left_now = boundary_left(k * ts.dt, constrained);
            bc.left_prev = boundary_left((k + 1) * ts.dt, constrained);
            // right boundary: far-field value of the put is zero
            const std::vector<double> rhs = sys.step_rhs(state, bc);
            state = solve_tracked(sys.left, rhs, &precond, "time step k=" + std::to_string(k));
            if (constrained) apply_exercise_constraint(state);
        }

        PriceSurface out;
        out.scheme = scheme_;
        out.map = map_;
        out.mls = mls_;
        out.rpi = rpi_;
        out.max_solver_iterations = max_iterations_seen_;
        if (scheme_ == Scheme::lbie) {
            out.coefficients = state;
            out.nodal = band_matvec(collocation_, state);
        } else {
            out.coefficients.resize(grid_.node_count());
            out.coefficients.front() = boundary_left(0.0, constrained);
            out.coefficients.back() = 0.0;
            std::copy(state.begin(), state.end(), out.coefficients.begin() + 1);
            out.nodal = out.coefficients;
        }
        return out;
    }

    /// Early-exercise floor applied to the physical nodal values: for LRPI
    /// the state is nodal already; for LBIE the nodal values are recovered,
    /// floored at the payoff and refitted through the collocation system.
    void apply_exercise_constraint(std::vector<double>& state) const {
        if (scheme_ == Scheme::lrpi) {
            for (std::size_t i = 0; i < state.size(); ++i)
                state[i] = std::max(state[i], payoff_state_[i]);
            return;
        }
        std::vector<double> nodal = band_matvec(collocation_, state);
        bool binding = false;
        for (std::size_t j = 0; j < nodal.size(); ++j) {
            if (nodal[j] < payoff_nodal_[j]) {
                nodal[j] = payoff_nodal_[j];
                binding = true;
            }
        }
        if (binding)
            state = solve_tracked(collocation_, nodal, colloc_precond_.get(), "exercise refit");
    }

    Scheme scheme_;
    ModelParams params_;
    NumericsConfig cfg_;
    Grid grid_;
    std::shared_ptr<const SinhStretching> map_;
    std::shared_ptr<const MlsBasis> mls_;
    std::shared_ptr<const RpiBasis> rpi_;
    SchemeKernels kernels_;
    BandedMatrix collocation_;
    std::unique_ptr<BandedFactorization> colloc_precond_;
    std::vector<double> payoff_nodal_;
    std::vector<double> payoff_state_;
    mutable int max_iterations_seen_ = 0;
};

inline PriceSurface price_european(Scheme scheme, const ModelParams& p, int n, int m,
                                   const NumericsConfig& cfg = {}) {
    return PricingEngine(scheme, p, n, cfg).price_european(m);
}

inline PriceSurface price_bermudan(Scheme scheme, const ModelParams& p, int n, int m,
                                   const NumericsConfig& cfg = {}) {
    return PricingEngine(scheme, p, n, cfg).price_bermudan(m);
}

inline PriceSurface price_american_richardson(Scheme scheme, const ModelParams& p, int n, int m,
                                              const NumericsConfig& cfg = {}) {
    return PricingEngine(scheme, p, n, cfg).price_american_richardson(m);
}

/// Prices at asset levels through the scheme's own expansion.
inline std::vector<double> evaluate_at(const PriceSurface& surface, const std::vector<double>& s_points) {
    return surface.values_at_s(s_points);
}

} // namespace mlwf

#endif
