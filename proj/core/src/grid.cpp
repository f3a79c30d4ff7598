#include "hjbqvi/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hjbqvi {

Grid1D Grid1D::uniform(double x_lo, double x_hi, double h) {
    if (!(x_lo < x_hi)) throw std::invalid_argument("grid requires x_lo < x_hi");
    if (!(h > 0.0)) throw std::invalid_argument("grid requires h > 0");
    const double count = (x_hi - x_lo) / h;
    const double rounded = std::round(count);
    if (std::abs(count - rounded) > 1e-9 * rounded || rounded < 1.0) {
        throw std::invalid_argument("(x_hi - x_lo)/h must be a positive integer");
    }
    Grid1D g;
    g.x_lo_ = x_lo;
    g.x_hi_ = x_hi;
    g.h_ = h;
    g.nodes_ = static_cast<std::size_t>(rounded);
    return g;
}

Grid1D Grid1D::dyadic(double x_lo, double x_hi, int n) {
    return uniform(x_lo, x_hi, std::ldexp(1.0, -n));
}

std::vector<double> Grid1D::node_values() const {
    std::vector<double> xs(nodes_);
    for (std::size_t l = 0; l < nodes_; ++l) xs[l] = node(l);
    return xs;
}

}  // namespace hjbqvi
