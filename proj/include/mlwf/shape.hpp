#ifndef MLWF_SHAPE_HPP
#define MLWF_SHAPE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlwf {

/// Thrown when a basis cannot be formed at a point (too few supporting
/// nodes, ill-conditioned moment matrix, singular interpolation matrix).
class SupportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape-function values and first/second derivatives at one evaluation
/// point. Supporting nodes form a contiguous index window on the uniform
/// grid: global node index = first_node + k.
struct ShapeEval {
    int first_node = 0;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> d2phi;

    int size() const { return static_cast<int>(phi.size()); }
    int support(int k) const { return first_node + k; }
    int last_node() const { return first_node + size() - 1; }

    /// Value of the expansion sum_j phi_j * coeff[j] over the full nodal
    /// coefficient vector.
    double expand(const std::vector<double>& coeff) const {
        double acc = 0.0;
        for (int k = 0; k < size(); ++k) acc += phi[k] * coeff[static_cast<std::size_t>(first_node + k)];
        return acc;
    }

    double expand_derivative(const std::vector<double>& coeff) const {
        double acc = 0.0;
        for (int k = 0; k < size(); ++k) acc += dphi[k] * coeff[static_cast<std::size_t>(first_node + k)];
        return acc;
    }
};

} // namespace mlwf

#endif
