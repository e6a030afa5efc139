#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mlwf/basis_mls.hpp"

using namespace mlwf;

TEST_CASE("cubic spline weight values") {
    const double rw = 0.3;
    CHECK(cubic_spline_weight(0.0, rw).w == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(cubic_spline_weight(rw, rw).w == 0.0);
    CHECK(cubic_spline_weight(rw, rw).dw == 0.0);
    CHECK(cubic_spline_weight(0.5 * rw, rw).w == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(cubic_spline_weight(2.0 * rw, rw).w == 0.0);
    CHECK_THROWS_AS(cubic_spline_weight(-0.1, rw), std::invalid_argument);
}

TEST_CASE("cubic spline weight is C2 across its junctions") {
    const double rw = 1.0;
    for (double r : {0.5, 1.0}) {
        const double eps = 1e-7;
        const WeightValue lo = cubic_spline_weight(r - eps, rw);
        const WeightValue hi = cubic_spline_weight(r + eps, rw);
        CHECK(lo.w == Catch::Approx(hi.w).margin(1e-6));
        CHECK(lo.dw == Catch::Approx(hi.dw).margin(1e-5));
        CHECK(lo.d2w == Catch::Approx(hi.d2w).margin(1e-4));
    }
}

TEST_CASE("MLS partition of unity and linear reproduction at random points") {
    const Grid g = make_grid(32);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = ux(rng);
        const ShapeEval se = basis.eval(x);
        double sum = 0.0, sum_x = 0.0;
        for (int k = 0; k < se.size(); ++k) {
            sum += se.phi[k];
            sum_x += se.phi[k] * g.node(se.support(k));
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-10));
        CHECK(sum_x == Catch::Approx(x).margin(1e-10));
    }
}

TEST_CASE("derivative consistency sums") {
    const Grid g = make_grid(64);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    for (int i = 0; i < 40; ++i) {
        const double x = ux(rng);
        const ShapeEval se = basis.eval(x);
        double s_d = 0.0, s_dx = 0.0, s_dd = 0.0, s_ddx = 0.0;
        for (int k = 0; k < se.size(); ++k) {
            const double xk = g.node(se.support(k));
            s_d += se.dphi[k];
            s_dx += se.dphi[k] * xk;
            s_dd += se.d2phi[k];
            s_ddx += se.d2phi[k] * xk;
        }
        CHECK(s_d == Catch::Approx(0.0).margin(1e-7));
        CHECK(s_dx == Catch::Approx(1.0).margin(1e-7));
        CHECK(s_dd == Catch::Approx(0.0).margin(1e-7));
        CHECK(s_ddx == Catch::Approx(0.0).margin(1e-7));
    }
}

TEST_CASE("boundary shape functions are Kronecker deltas") {
    // r_q = 0.51 h, r_w = 4 r_q
    for (int n : {16, 64, 128}) {
        const Grid g = make_grid(n);
        const MlsBasis basis(g, MlsConfig{g.r_w});
        const ShapeEval left = basis.eval(0.0);
        for (int k = 0; k < left.size(); ++k) {
            const double expected = left.support(k) == 0 ? 1.0 : 0.0;
            CHECK(left.phi[k] == Catch::Approx(expected).margin(1e-10));
        }
        const ShapeEval right = basis.eval(1.0);
        for (int k = 0; k < right.size(); ++k) {
            const double expected = right.support(k) == g.n_intervals ? 1.0 : 0.0;
            CHECK(right.phi[k] == Catch::Approx(expected).margin(1e-10));
        }
    }
}

TEST_CASE("MLS shape derivatives match central finite differences") {
    const Grid g = make_grid(32);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    const double step = 1e-6 * basis.support_radius();
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> ux(0.1, 0.9);
    for (int rep = 0; rep < 25; ++rep) {
        // keep clear of the support-window transitions at the nodes
        double x = ux(rng);
        const double frac = x / g.h - std::floor(x / g.h);
        if (frac < 0.05 || frac > 0.95) continue;
        const ShapeEval se = basis.eval(x);
        const ShapeEval lo = basis.eval(x - step);
        const ShapeEval hi = basis.eval(x + step);
        REQUIRE(lo.first_node == se.first_node);
        REQUIRE(hi.first_node == se.first_node);
        for (int k = 0; k < se.size(); ++k) {
            const double d_fd = (hi.phi[k] - lo.phi[k]) / (2.0 * step);
            const double dd_fd = (hi.dphi[k] - lo.dphi[k]) / (2.0 * step);
            const double dscale = std::max(std::abs(se.dphi[k]), 1.0 / g.h);
            const double ddscale = std::max(std::abs(se.d2phi[k]), 1.0 / (g.h * g.h));
            CHECK(std::abs(se.dphi[k] - d_fd) <= 1e-5 * dscale);
            CHECK(std::abs(se.d2phi[k] - dd_fd) <= 1e-5 * ddscale);
        }
    }
}

TEST_CASE("support deficiency reported with the offending point") {
    const Grid g = make_grid(16);
    // radius below one spacing cannot support the linear basis
    CHECK_THROWS_AS(MlsBasis(g, MlsConfig{0.4 * g.h}), SupportError);
    try {
        MlsBasis(g, MlsConfig{0.4 * g.h});
    } catch (const SupportError& e) {
        CHECK(std::string(e.what()).find("support radius") != std::string::npos);
    }
}

TEST_CASE("MLS lacks the delta property away from the boundary") {
    const Grid g = make_grid(16);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    const ShapeEval se = basis.eval(g.node(8));
    for (int k = 0; k < se.size(); ++k)
        if (se.support(k) == 8) CHECK(se.phi[k] != Catch::Approx(1.0).margin(0.01));
}
