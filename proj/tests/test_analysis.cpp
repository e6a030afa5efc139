#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "mlwf/analysis.hpp"

using namespace mlwf;

TEST_CASE("error metrics") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const ErrorReport zero = error_metrics(a, a);
    CHECK(zero.rms == 0.0);
    CHECK(zero.max == 0.0);

    std::vector<double> b = a;
    b[0] += 3.0;
    const ErrorReport single = error_metrics(b, a);
    CHECK(single.max == Catch::Approx(3.0));
    CHECK(single.rms == Catch::Approx(3.0 / 9.0)); // 1/(8+1) prefactor outside the root

    CHECK_THROWS_AS(error_metrics(a, std::vector<double>(4, 0.0)), std::invalid_argument);
}

TEST_CASE("refinement ratio formula") {
    // one refinement of the reference European table
    CHECK(convergence_ratio(6.94e-3, 5.55e-4) == Catch::Approx(3.64).margin(0.005));
    CHECK(convergence_ratio(4.0, 1.0) == Catch::Approx(2.0));
}

TEST_CASE("amplification factor scalar cases") {
    CHECK(amplification_factor({-1.0, 0.0}, 0.5, 1.0) == Catch::Approx(1.0 / 3.0));
    // implicit Euler damps every eigenvalue with a nonpositive real part
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ur(-50.0, 0.0), ui(-30.0, 30.0), ud(0.01, 2.0);
    for (int k = 0; k < 200; ++k) {
        const std::complex<double> lam(ur(rng), ui(rng));
        CHECK(amplification_factor(lam, 0.0, ud(rng)) <= 1.0 + 1e-12);
        CHECK(amplification_factor(lam, 0.5, ud(rng)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("stability diagnostic on the European test problem") {
    ModelParams p = european_test_params();
    for (Scheme sc : {Scheme::lbie, Scheme::lrpi}) {
        for (int n : {16, 32, 64}) {
            for (double theta : {0.0, 0.5}) {
                p.theta = theta;
                const StabilityReport rep = stability_diagnostic(sc, p, n, n);
                CHECK(rep.upsilon_dim == n - 1);
                CHECK(rep.max_real_part <= 1e-8);
                CHECK(rep.amplification_bound <= 1.0 + 1e-10);
                CHECK(rep.stable());
            }
        }
    }
    CHECK_THROWS_AS(stability_diagnostic(Scheme::lbie, p, 2048, 2048), std::invalid_argument);
}

TEST_CASE("eigenvalue-ratio bound matches the dense spectral radius of the step matrix") {
    const ModelParams p = european_test_params();
    const int n = 16;
    const double dt = p.maturity / n;
    const Grid g = make_grid(n);
    const SinhStretching map(p);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    const SchemeKernels kernels = lbie_kernels(g, basis, map, p.rate);
    const StabilityReport rep = stability_from_kernels(kernels, dt, p.theta);

    // Sigma = (theta-1) Upsilon + I/dt, Gamma = theta Upsilon + I/dt;
    // the bound from the eigenvalue ratio must match rho(Sigma^{-1} Gamma)
    const StabilityBlocks blocks = stability_blocks(kernels);
    const int dim = blocks.mass.rows();
    const LuFactorization mass_lu(blocks.mass);
    DenseMatrix upsilon(dim, dim);
    std::vector<double> col(dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) col[i] = blocks.spatial(i, j);
        const std::vector<double> u = mass_lu.solve(col);
        for (int i = 0; i < dim; ++i) upsilon(i, j) = u[i];
    }
    DenseMatrix sigma(dim, dim), gamma(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            sigma(i, j) = (p.theta - 1.0) * upsilon(i, j) + (i == j ? 1.0 / dt : 0.0);
            gamma(i, j) = p.theta * upsilon(i, j) + (i == j ? 1.0 / dt : 0.0);
        }
    const LuFactorization sigma_lu(sigma);
    DenseMatrix product(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) col[i] = gamma(i, j);
        const std::vector<double> u = sigma_lu.solve(col);
        for (int i = 0; i < dim; ++i) product(i, j) = u[i];
    }
    double rho = 0.0;
    for (const auto& lam : eigenvalues_dense(product)) rho = std::max(rho, std::abs(lam));
    CHECK(rep.amplification_bound == Catch::Approx(rho).margin(1e-6));
}

TEST_CASE("Gershgorin rows of the assembled left matrix pin the unit eigenvalue") {
    const ModelParams p = european_test_params();
    const Grid g = make_grid(32);
    const SinhStretching map(p);
    const MlsBasis basis(g, MlsConfig{g.r_w});
    const AssembledSystem sys = make_system(lbie_kernels(g, basis, map, p.rate), 0.1, 0.5);
    const int last = sys.dims - 1;
    CHECK(sys.left.at(0, 0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(sys.left.at(last, last) == Catch::Approx(1.0).margin(1e-12));
    double off = 0.0;
    for (int j = 1; j < sys.dims; ++j) off += std::abs(sys.left.at(0, j));
    for (int j = 0; j < last; ++j) off += std::abs(sys.left.at(last, j));
    CHECK(off <= 1e-12); // zero-radius discs: eigenvalue exactly one
}
