#ifndef MLWF_EIG_HPP
#define MLWF_EIG_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlwf/linalg.hpp"

namespace mlwf {

namespace detail {

// Parlett-Reinsch balancing: diagonal similarity scaling so row and column
// norms become comparable.
inline void balance(DenseMatrix& a) {
    const int n = a.rows();
    const double radix = 2.0;
    const double sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) { f *= radix; c *= sq; }
            g = r * radix;
            while (c > g) { f /= radix; c /= sq; }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (int j = 0; j < n; ++j) a(i, j) *= ginv;
                for (int j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations; the strictly-lower fill is zeroed afterwards.
inline void hessenberg(DenseMatrix& a) {
    const int n = a.rows();
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int pivot = m;
        for (int j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                pivot = j;
            }
        }
        if (pivot != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                a(i, m - 1) = y;
                for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

inline double sign_of(double magnitude, double sign_source) {
    return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on a Hessenberg matrix, eigenvalues only
// (EISPACK hqr lineage).
inline std::vector<std::complex<double>> hqr(DenseMatrix& a) {
    const int n = a.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<std::complex<double>> evals(n);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) return evals;

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                evals[nn--] = x + t;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        evals[nn - 1] = evals[nn] = x + z;
                        if (z != 0.0) evals[nn] = x - w / z;
                    } else {
                        evals[nn] = std::complex<double>(x + p, z);
                        evals[nn - 1] = std::conj(evals[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == 60)
                        throw std::runtime_error("eigenvalues_dense: QR iteration did not converge");
                    if (its != 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = 0;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        const double rdiff = x - z;
                        const double sdiff = y - z;
                        p = (rdiff * sdiff - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rdiff - sdiff;
                        r = a(m + 2, m + 1);
                        const double scale = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) *
                                         (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    if (m < l) m = l;
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        double colscale = 0.0;
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k + 1 != nn) ? a(k + 2, k - 1) : 0.0;
                            colscale = std::abs(p) + std::abs(q) + std::abs(r);
                            if (colscale != 0.0) {
                                p /= colscale;
                                q /= colscale;
                                r /= colscale;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * colscale;
                        }
                        p += s;
                        const double xfac = p / s;
                        const double yfac = q / s;
                        const double zfac = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                pp += r * a(k + 2, j);
                                a(k + 2, j) -= pp * zfac;
                            }
                            a(k + 1, j) -= pp * yfac;
                            a(k, j) -= pp * xfac;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pp = xfac * a(i, k) + yfac * a(i, k + 1);
                            if (k + 1 != nn) {
                                pp += zfac * a(i, k + 2);
                                a(i, k + 2) -= pp * r;
                            }
                            a(i, k + 1) -= pp * q;
                            a(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return evals;
}

} // namespace detail

/// Full complex spectrum of a real square matrix via balancing, Hessenberg
/// reduction and Francis double-shift QR. Diagnostic-grade: intended for
/// dimensions up to ~1100.
inline std::vector<std::complex<double>> eigenvalues_dense(DenseMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues_dense: matrix not square");
    if (a.rows() > 1100)
        throw std::invalid_argument("eigenvalues_dense: dimension cap (1100) exceeded: n = " +
                                    std::to_string(a.rows()));
    if (a.rows() == 0) return {};
    if (a.rows() == 1) return {std::complex<double>(a(0, 0), 0.0)};
    detail::balance(a);
    detail::hessenberg(a);
    return detail::hqr(a);
}

} // namespace mlwf

#endif
