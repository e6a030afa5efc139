#ifndef MLWF_BANDED_HPP
#define MLWF_BANDED_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlwf {

/// Square banded matrix with half-bandwidth p: entries with |i-j| > p are
/// structurally zero. Storage is row-major, 2p+1 slots per row.
class BandedMatrix {
public:
    BandedMatrix() = default;

    BandedMatrix(int n, int half_bandwidth)
        : n_(n), p_(half_bandwidth), data_(static_cast<std::size_t>(n) * (2 * half_bandwidth + 1), 0.0) {
        if (n < 1 || half_bandwidth < 0)
            throw std::invalid_argument("BandedMatrix: need n >= 1 and half_bandwidth >= 0");
    }

    int rows() const { return n_; }
    int half_bandwidth() const { return p_; }

    bool in_band(int i, int j) const {
        return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= p_ && i - j <= p_;
    }

    double at(int i, int j) const {
        return in_band(i, j) ? data_[slot(i, j)] : 0.0;
    }

    /// Mutable access; addressing outside the band is a structural error.
    double& ref(int i, int j) {
        if (!in_band(i, j))
            throw std::out_of_range("BandedMatrix: (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") outside band p=" + std::to_string(p_));
        return data_[slot(i, j)];
    }

    void add(int i, int j, double v) { ref(i, j) += v; }

    void zero_row(int i) {
        for (int j = std::max(0, i - p_); j <= std::min(n_ - 1, i + p_); ++j)
            data_[slot(i, j)] = 0.0;
    }

    std::vector<double> to_dense() const {
        std::vector<double> d(static_cast<std::size_t>(n_) * n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = std::max(0, i - p_); j <= std::min(n_ - 1, i + p_); ++j)
                d[static_cast<std::size_t>(i) * n_ + j] = data_[slot(i, j)];
        return d;
    }

private:
    std::size_t slot(int i, int j) const {
        return static_cast<std::size_t>(i) * (2 * p_ + 1) + (j - i + p_);
    }

    int n_ = 0;
    int p_ = 0;
    std::vector<double> data_;
};

/// y = A*x exploiting the band; cost O(n*(2p+1)).
inline std::vector<double> band_matvec(const BandedMatrix& a, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != a.rows())
        throw std::invalid_argument("band_matvec: dimension mismatch");
    const int n = a.rows();
    const int p = a.half_bandwidth();
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - p);
        const int j1 = std::min(n - 1, i + p);
        double acc = 0.0;
        for (int j = j0; j <= j1; ++j)
            acc += a.at(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

} // namespace mlwf

#endif
