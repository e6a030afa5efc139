#ifndef MLWF_LINALG_HPP
#define MLWF_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlwf/banded.hpp"

namespace mlwf {

struct SolverConfig {
    double tolerance = 1e-10; // relative residual target
    int max_iterations = 200;
};

/// Thrown when an iterative solve breaks down or fails to converge.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

struct BicgstabResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0; // recomputed ||b - A x||_2
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace detail

/// LU factorization of a banded matrix without pivoting; for bandwidth p
/// the factors incur no fill outside the band. Used directly as a banded
/// solve and as the right preconditioner of the time-stepping loops.
class BandedFactorization {
public:
    explicit BandedFactorization(const BandedMatrix& a) : lu_(a) {
        const int n = lu_.rows();
        const int p = lu_.half_bandwidth();
        for (int k = 0; k < n; ++k) {
            const double pivot = lu_.at(k, k);
            if (std::abs(pivot) < 1e-300)
                throw std::runtime_error("BandedFactorization: zero pivot at row " + std::to_string(k));
            for (int i = k + 1; i <= std::min(n - 1, k + p); ++i) {
                const double l = lu_.at(i, k) / pivot;
                if (l == 0.0) continue;
                lu_.ref(i, k) = l;
                for (int j = k + 1; j <= std::min(n - 1, k + p); ++j)
                    lu_.ref(i, j) -= l * lu_.at(k, j);
            }
        }
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        const int n = lu_.rows();
        const int p = lu_.half_bandwidth();
        std::vector<double> z = v;
        for (int i = 0; i < n; ++i) {
            double acc = z[i];
            for (int j = std::max(0, i - p); j < i; ++j) acc -= lu_.at(i, j) * z[j];
            z[i] = acc;
        }
        for (int i = n - 1; i >= 0; --i) {
            double acc = z[i];
            for (int j = i + 1; j <= std::min(n - 1, i + p); ++j) acc -= lu_.at(i, j) * z[j];
            z[i] = acc / lu_.at(i, i);
        }
        return z;
    }

private:
    BandedMatrix lu_;
};

/// BiCGSTAB (van der Vorst) with shadow residual r0 and zero initial
/// guess; optionally right-preconditioned, so the convergence test always
/// sees the true residual. Returns the solution together with the
/// iteration count and the recomputed residual.
inline BicgstabResult bicgstab(const BandedMatrix& a, const std::vector<double>& b,
                               const SolverConfig& cfg = {},
                               const BandedFactorization* precond = nullptr) {
    if (cfg.tolerance <= 0.0 || cfg.max_iterations < 1)
        throw std::invalid_argument("bicgstab: invalid SolverConfig");
    if (static_cast<int>(b.size()) != a.rows())
        throw std::invalid_argument("bicgstab: dimension mismatch");

    const std::size_t n = b.size();
    const double bnorm = detail::norm2(b);
    BicgstabResult out;
    out.x.assign(n, 0.0);
    if (bnorm == 0.0) return out; // b = 0 -> x = 0 exactly

    constexpr double breakdown = 1e-300;
    std::vector<double> r = b; // r0 = b - A*0
    const std::vector<double> r0 = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    auto solve_m = [&](const std::vector<double>& w) { return precond ? precond->apply(w) : w; };

    auto finish = [&](int iters) {
        std::vector<double> ax = band_matvec(a, out.x);
        for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
        out.iterations = iters;
        out.residual = detail::norm2(ax);
    };

    for (int k = 1; k <= cfg.max_iterations; ++k) {
        const double rho_new = detail::dot(r0, r);
        if (std::abs(rho_new) < breakdown)
            throw SolverError("bicgstab: rho breakdown at iteration " + std::to_string(k),
                              detail::norm2(r), k - 1);
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        const std::vector<double> p_hat = solve_m(p);
        v = band_matvec(a, p_hat);
        const double r0v = detail::dot(r0, v);
        if (std::abs(r0v) < breakdown)
            throw SolverError("bicgstab: <r0,v> breakdown at iteration " + std::to_string(k),
                              detail::norm2(r), k - 1);
        alpha = rho / r0v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm2(s) <= cfg.tolerance * bnorm) {
            for (std::size_t i = 0; i < n; ++i) out.x[i] += alpha * p_hat[i];
            finish(k);
            return out;
        }
        const std::vector<double> s_hat = solve_m(s);
        t = band_matvec(a, s_hat);
        const double tt = detail::dot(t, t);
        if (tt < breakdown)
            throw SolverError("bicgstab: <t,t> breakdown at iteration " + std::to_string(k),
                              detail::norm2(s), k);
        omega = detail::dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) out.x[i] += alpha * p_hat[i] + omega * s_hat[i];
        for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
        if (detail::norm2(r) <= cfg.tolerance * bnorm) {
            finish(k);
            return out;
        }
        if (std::abs(omega) < breakdown)
            throw SolverError("bicgstab: omega breakdown at iteration " + std::to_string(k),
                              detail::norm2(r), k);
    }
    std::vector<double> ax = band_matvec(a, out.x);
    for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
    throw SolverError("bicgstab: no convergence within " + std::to_string(cfg.max_iterations) +
                          " iterations",
                      detail::norm2(ax), cfg.max_iterations);
}

/// Minimal dense row-major matrix used by the direct-solve oracle and the
/// stability diagnostic.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_banded(const BandedMatrix& a) {
        DenseMatrix m(a.rows(), a.rows());
        m.d_ = a.to_dense();
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * c_ + j]; }
    double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * c_ + j]; }
    const std::vector<double>& data() const { return d_; }

    std::vector<double> multiply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != c_)
            throw std::invalid_argument("DenseMatrix::multiply: dimension mismatch");
        std::vector<double> y(r_, 0.0);
        for (int i = 0; i < r_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < c_; ++j) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    DenseMatrix multiply(const DenseMatrix& b) const {
        if (c_ != b.r_) throw std::invalid_argument("DenseMatrix::multiply: dimension mismatch");
        DenseMatrix y(r_, b.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.c_; ++j) y(i, j) += aik * b(k, j);
            }
        return y;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<double> d_;
};

/// LU factorization with partial pivoting, kept around so several
/// right-hand sides can reuse one factorization.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
        const int n = lu_.rows();
        if (n != lu_.cols()) throw std::invalid_argument("LuFactorization: matrix not square");
        for (int i = 0; i < n; ++i) piv_[i] = i;
        for (int k = 0; k < n; ++k) {
            int imax = k;
            double amax = std::abs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > amax) { amax = v; imax = i; }
            }
            if (amax == 0.0)
                throw std::runtime_error("LuFactorization: singular to working precision at column " +
                                         std::to_string(k));
            if (imax != k) {
                std::swap(piv_[k], piv_[imax]);
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(imax, j));
            }
            const double pivot = lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                lu_(i, k) /= pivot;
                const double lik = lu_(i, k);
                if (lik == 0.0) continue;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
            }
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        const int n = lu_.rows();
        if (static_cast<int>(b.size()) != n)
            throw std::invalid_argument("LuFactorization::solve: dimension mismatch");
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
        for (int i = 1; i < n; ++i) {
            double acc = x[i];
            for (int j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
            x[i] = acc;
        }
        for (int i = n - 1; i >= 0; --i) {
            double acc = x[i];
            for (int j = i + 1; j < n; ++j) acc -= lu_(i, j) * x[j];
            x[i] = acc / lu_(i, i);
        }
        return x;
    }

private:
    DenseMatrix lu_;
    std::vector<int> piv_;
};

inline std::vector<double> dense_lu_solve(const DenseMatrix& a, const std::vector<double>& b) {
    return LuFactorization(a).solve(b);
}

} // namespace mlwf

#endif
