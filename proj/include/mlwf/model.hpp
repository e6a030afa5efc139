#ifndef MLWF_MODEL_HPP
#define MLWF_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlwf {

/// Market and contract data for a put under Black-Scholes, together with
/// the domain truncation, the node-stretching intensity and the weight of
/// the one-parameter time scheme.
struct ModelParams {
    double sigma;    // volatility, year^{-1/2}
    double rate;     // interest rate, year^{-1}
    double strike;   // E
    double maturity; // T, years
    double s_max;    // domain truncation, currency
    double xi;       // stretching intensity
    double theta;    // time-scheme weight in [0,1]

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be > 0");
        if (!(rate >= 0.0)) throw std::invalid_argument("ModelParams: rate must be >= 0");
        if (!(strike > 0.0)) throw std::invalid_argument("ModelParams: strike must be > 0");
        if (!(maturity > 0.0)) throw std::invalid_argument("ModelParams: maturity must be > 0");
        if (!(s_max > strike)) throw std::invalid_argument("ModelParams: s_max must exceed strike");
        if (!(xi > 0.0)) throw std::invalid_argument("ModelParams: xi must be > 0");
        if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("ModelParams: theta must be in [0,1]");
    }
};

/// European put test problem: sigma = 0.2, r = 0.05, E = 10, T = 0.5.
inline ModelParams european_test_params() {
    return ModelParams{0.2, 0.05, 10.0, 0.5, 50.0, 1.0, 0.5};
}

/// American put test problem: sigma = 0.3, r = 0.1, E = 100, T = 1.
inline ModelParams american_test_params() {
    return ModelParams{0.3, 0.1, 100.0, 1.0, 500.0, 0.1, 0.5};
}

inline double put_payoff(double s, double strike) {
    if (s < 0.0) throw std::invalid_argument("put_payoff: negative asset price s = " + std::to_string(s));
    if (!(strike > 0.0)) throw std::invalid_argument("put_payoff: strike must be > 0");
    return std::max(strike - s, 0.0);
}

/// Standard normal CDF through erfc; absolute error well below 1e-12.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Analytic Black-Scholes European put value at asset level s and time t.
/// Requires 0 <= t < T; at t = T use the payoff directly.
inline double bs_put_exact(double s, double t, const ModelParams& p) {
    if (s < 0.0) throw std::invalid_argument("bs_put_exact: negative asset price");
    if (!(t >= 0.0 && t < p.maturity))
        throw std::invalid_argument("bs_put_exact: time must satisfy 0 <= t < maturity");
    const double tau = p.maturity - t;
    const double disc = std::exp(-p.rate * tau);
    if (s == 0.0) return p.strike * disc;
    const double vol = p.sigma * std::sqrt(tau);
    const double d1 = (std::log(s / p.strike) + (p.rate + 0.5 * p.sigma * p.sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return p.strike * disc * normal_cdf(-d2) - s * normal_cdf(-d1);
}

} // namespace mlwf

#endif
