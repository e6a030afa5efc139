#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "mlwf/eig.hpp"

using namespace mlwf;

namespace {

std::vector<std::complex<double>> sorted(std::vector<std::complex<double>> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

// Cyclic Jacobi eigensolver for symmetric matrices: independent oracle.
std::vector<double> jacobi_symmetric(DenseMatrix a) {
    const int n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-26) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> evals(n);
    for (int i = 0; i < n; ++i) evals[i] = a(i, i);
    std::sort(evals.begin(), evals.end());
    return evals;
}

} // namespace

TEST_CASE("spectrum of a diagonal matrix is its diagonal") {
    DenseMatrix a(4, 4);
    a(0, 0) = 3.0;
    a(1, 1) = -1.0;
    a(2, 2) = 0.5;
    a(3, 3) = 7.0;
    const auto ev = sorted(eigenvalues_dense(a));
    const std::vector<double> expected{-1.0, 0.5, 3.0, 7.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(ev[i].real() == Catch::Approx(expected[i]).margin(1e-12));
        CHECK(std::abs(ev[i].imag()) <= 1e-12);
    }
}

TEST_CASE("rotation matrix has spectrum +-i") {
    DenseMatrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    const auto ev = sorted(eigenvalues_dense(a));
    CHECK(ev[0].real() == Catch::Approx(0.0).margin(1e-12));
    CHECK(ev[0].imag() == Catch::Approx(-1.0).margin(1e-12));
    CHECK(ev[1].imag() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("companion matrix of (x-1)(x-2)(x-3)") {
    // x^3 - 6x^2 + 11x - 6
    DenseMatrix a(3, 3);
    a(0, 0) = 6.0;
    a(0, 1) = -11.0;
    a(0, 2) = 6.0;
    a(1, 0) = 1.0;
    a(2, 1) = 1.0;
    const auto ev = sorted(eigenvalues_dense(a));
    CHECK(ev[0].real() == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(ev[1].real() == Catch::Approx(2.0).epsilon(1e-8));
    CHECK(ev[2].real() == Catch::Approx(3.0).epsilon(1e-8));
    for (const auto& l : ev) CHECK(std::abs(l.imag()) <= 1e-9);
}

TEST_CASE("QR spectrum matches Jacobi on random symmetric matrices") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 8 + 6 * trial;
        DenseMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
        const std::vector<double> exact = jacobi_symmetric(a);
        const auto ev = sorted(eigenvalues_dense(a));
        for (int i = 0; i < n; ++i) {
            CHECK(ev[i].real() == Catch::Approx(exact[i]).margin(1e-8));
            CHECK(std::abs(ev[i].imag()) <= 1e-9);
        }
    }
}

TEST_CASE("nonsymmetric spectrum matches a similarity-transformed diagonal") {
    // B = T D T^{-1} with a fixed well-conditioned T
    const int n = 6;
    DenseMatrix t(n, n), d(n, n);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) t(i, j) = u(rng);
        t(i, i) += 1.0;
        d(i, i) = i - 2.5;
    }
    const LuFactorization lu(t);
    DenseMatrix b(n, n);
    // columns of B = T D T^{-1}: solve T y = e_j, then B e_j = T D y
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const std::vector<double> y = lu.solve(e);
        std::vector<double> dy(n);
        for (int i = 0; i < n; ++i) dy[i] = d(i, i) * y[i];
        const std::vector<double> col = t.multiply(dy);
        for (int i = 0; i < n; ++i) b(i, j) = col[i];
    }
    const auto ev = sorted(eigenvalues_dense(b));
    for (int i = 0; i < n; ++i) {
        CHECK(ev[i].real() == Catch::Approx(i - 2.5).margin(1e-9));
        CHECK(std::abs(ev[i].imag()) <= 1e-9);
    }
}

TEST_CASE("dimension cap enforced") {
    CHECK_THROWS_AS(eigenvalues_dense(DenseMatrix(1200, 1200)), std::invalid_argument);
}
