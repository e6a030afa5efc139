#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mlwf/model.hpp"

using namespace mlwf;

namespace {

// Independent oracle for the European put: risk-neutral expectation of the
// discounted payoff, integrated in the standard normal variable with
// composite Simpson up to the kink of the payoff.
double put_by_quadrature(double s, const ModelParams& p) {
    const double tau = p.maturity;
    const double drift = (p.rate - 0.5 * p.sigma * p.sigma) * tau;
    const double vol = p.sigma * std::sqrt(tau);
    // payoff positive only below z* where s*exp(drift + vol z) = strike
    const double z_star = (std::log(p.strike / s) - drift) / vol;
    const double lo = std::min(z_star, 0.0) - 14.0;
    const int m = 40000;
    const double w = (z_star - lo) / m;
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double z = lo + k * w;
        const double st = s * std::exp(drift + vol * z);
        const double f = (p.strike - st) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        const double weight = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += weight * f;
    }
    return std::exp(-p.rate * tau) * acc * w / 3.0;
}

} // namespace

TEST_CASE("put payoff branches") {
    CHECK(put_payoff(10.0, 10.0) == 0.0);
    CHECK(put_payoff(8.0, 10.0) == 2.0);
    CHECK(put_payoff(12.0, 10.0) == 0.0);
    CHECK_THROWS_AS(put_payoff(-1.0, 10.0), std::invalid_argument);
}

TEST_CASE("analytic put boundary and far-field values") {
    const ModelParams p = european_test_params();
    CHECK(bs_put_exact(0.0, 0.0, p) == Catch::Approx(10.0 * std::exp(-0.025)).epsilon(1e-14));
    CHECK(bs_put_exact(0.0, 0.0, p) == Catch::Approx(9.75310).margin(1e-5));
    CHECK(std::abs(bs_put_exact(1e8, 0.0, p)) <= 1e-12);
    CHECK_THROWS_AS(bs_put_exact(10.0, p.maturity, p), std::invalid_argument);
    CHECK_THROWS_AS(bs_put_exact(-1.0, 0.0, p), std::invalid_argument);
}

TEST_CASE("analytic put against the risk-neutral quadrature oracle") {
    const ModelParams p = european_test_params();
    const double at_money = bs_put_exact(10.0, 0.0, p);
    CHECK(at_money == Catch::Approx(put_by_quadrature(10.0, p)).margin(1e-4));
    CHECK(at_money == Catch::Approx(0.4420).margin(5e-4));
    for (double s : {6.0, 8.0, 9.5, 11.0, 14.0, 25.0})
        CHECK(bs_put_exact(s, 0.0, p) == Catch::Approx(put_by_quadrature(s, p)).margin(1e-4));
}

TEST_CASE("analytic put bounds, parity, convexity, monotonicity") {
    const ModelParams p = european_test_params();
    const double disc = p.strike * std::exp(-p.rate * p.maturity);
    double prev = bs_put_exact(0.0, 0.0, p);
    for (int i = 1; i <= 200; ++i) {
        const double s = 0.25 * i;
        const double v = bs_put_exact(s, 0.0, p);
        CHECK(v >= std::max(disc - s, 0.0) - 1e-12); // parity lower bound
        CHECK(v <= disc + 1e-12);
        CHECK(v <= prev + 1e-12); // non-increasing in s
        prev = v;
    }
    // convexity via second differences
    const double ds = 0.1;
    for (double s = 0.5; s < 30.0; s += 0.5) {
        const double d2 = bs_put_exact(s + ds, 0.0, p) - 2.0 * bs_put_exact(s, 0.0, p) +
                          bs_put_exact(s - ds, 0.0, p);
        CHECK(d2 >= -1e-9);
    }
    for (double s : {0.0, 4.0, 10.0, 30.0}) CHECK(put_payoff(s, p.strike) <= p.strike);
}

TEST_CASE("parameter validation") {
    ModelParams p = european_test_params();
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = european_test_params();
    p.s_max = p.strike;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = european_test_params();
    p.theta = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
