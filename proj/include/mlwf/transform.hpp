#ifndef MLWF_TRANSFORM_HPP
#define MLWF_TRANSFORM_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "mlwf/model.hpp"

namespace mlwf {

/// PDE coefficients at a point of the stretched coordinate, for time step dt:
///   gamma1 = 1/dt - theta*r   (weights the known time level)
///   gamma2 = 1/dt + (1-theta)*r (weights the unknown time level)
/// gamma2 - gamma1 = r holds exactly by construction.
struct TransformCoefficients {
    double alpha;
    double beta;
    double gamma1;
    double gamma2;
};

/// The asinh node-clustering map between asset price in [0, s_max] and the
/// unit computational coordinate; nodes placed uniformly in x concentrate
/// around the strike in s. Exposes the closed-form derivatives of s(x) and
/// of the induced PDE coefficients alpha, beta so that weak-form kernels
/// never rely on numerical differencing.
class SinhStretching {
public:
    explicit SinhStretching(const ModelParams& p)
        : strike_(p.strike), s_max_(p.s_max), xi_(p.xi), sigma_(p.sigma), rate_(p.rate) {
        p.validate();
        a_ = std::asinh(xi_ * strike_);
        b_ = std::asinh(xi_ * (s_max_ - strike_));
        c_ = a_ + b_;
    }

    double x_of_s(double s) const {
        if (s < 0.0 || s > s_max_)
            throw std::invalid_argument("x_of_s: s = " + std::to_string(s) + " outside [0, s_max]");
        if (s == 0.0) return 0.0;
        if (s == s_max_) return 1.0;
        return (std::asinh(xi_ * (s - strike_)) + a_) / c_;
    }

    double s_of_x(double x) const {
        check_x(x);
        if (x == 1.0) return s_max_;
        return std::sinh(c_ * x - a_) / xi_ + strike_;
    }

    double ds_dx(double x) const {
        check_x(x);
        return (c_ / xi_) * std::cosh(c_ * x - a_);
    }

    double d2s_dx2(double x) const {
        check_x(x);
        return (c_ * c_ / xi_) * std::sinh(c_ * x - a_);
    }

    double d3s_dx3(double x) const {
        check_x(x);
        return (c_ * c_ * c_ / xi_) * std::cosh(c_ * x - a_);
    }

    // alpha = sigma^2/2 * (s/s')^2
    double alpha(double x) const {
        const double g = ratio(x);
        return 0.5 * sigma_ * sigma_ * g * g;
    }

    double alpha_d(double x) const {
        return sigma_ * sigma_ * ratio(x) * ratio_d(x);
    }

    double alpha_dd(double x) const {
        const double g = ratio(x);
        const double gd = ratio_d(x);
        return sigma_ * sigma_ * (gd * gd + g * ratio_dd(x));
    }

    // beta = -alpha * s''/s' + r * s/s'
    double beta(double x) const {
        return -alpha(x) * d2s_dx2(x) / ds_dx(x) + rate_ * ratio(x);
    }

    double beta_d(double x) const {
        const double sp = ds_dx(x);
        const double spp = d2s_dx2(x);
        const double sppp = d3s_dx3(x);
        return -alpha_d(x) * spp / sp - alpha(x) * (sppp * sp - spp * spp) / (sp * sp) +
               rate_ * ratio_d(x);
    }

    TransformCoefficients coefficients_at(double x, double dt, double theta) const {
        if (!(dt > 0.0)) throw std::invalid_argument("coefficients_at: dt must be > 0");
        TransformCoefficients c;
        c.alpha = alpha(x);
        c.beta = beta(x);
        c.gamma1 = 1.0 / dt - theta * rate_;
        c.gamma2 = c.gamma1 + rate_;
        return c;
    }

    double rate() const { return rate_; }

private:
    void check_x(double x) const {
        if (x < 0.0 || x > 1.0)
            throw std::invalid_argument("SinhStretching: x = " + std::to_string(x) + " outside [0,1]");
    }

    // g = s/s' and its derivatives
    double ratio(double x) const { return s_of_x(x) / ds_dx(x); }

    double ratio_d(double x) const {
        const double sp = ds_dx(x);
        return 1.0 - s_of_x(x) * d2s_dx2(x) / (sp * sp);
    }

    double ratio_dd(double x) const {
        const double s = s_of_x(x);
        const double sp = ds_dx(x);
        const double spp = d2s_dx2(x);
        const double sppp = d3s_dx3(x);
        return -(sp * spp + s * sppp) / (sp * sp) + 2.0 * s * spp * spp / (sp * sp * sp);
    }

    double strike_, s_max_, xi_, sigma_, rate_;
    double a_, b_, c_;
};

/// Convenience wrapper matching the free-function contract.
inline TransformCoefficients coefficients_at(double x, double dt, const ModelParams& p) {
    if (!(x > 0.0 && x < 1.0))
        throw std::invalid_argument("coefficients_at: interior point required (0 < x < 1)");
    return SinhStretching(p).coefficients_at(x, dt, p.theta);
}

} // namespace mlwf

#endif
