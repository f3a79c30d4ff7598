#ifndef HJBQVI_GRID_HPP
#define HJBQVI_GRID_HPP

#include <cstddef>
#include <vector>

namespace hjbqvi {

/**
 * Uniform 1-D grid of unknowns x_l = x_lo + l*h, l = 0..nodes-1, together
 * with a Dirichlet node at x_hi = x_lo + nodes*h that carries the boundary
 * datum and is eliminated from the system.
 */
class Grid1D {
  public:
    Grid1D() = default;

    /// Grid with mesh width h; (x_hi - x_lo)/h must be integral.
    static Grid1D uniform(double x_lo, double x_hi, double h);

    /// Dyadic mesh h = 2^-n, the refinement family used by the experiments.
    static Grid1D dyadic(double x_lo, double x_hi, int n);

    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double h() const { return h_; }
    std::size_t nodes() const { return nodes_; }

    double node(std::size_t l) const { return x_lo_ + static_cast<double>(l) * h_; }
    double dirichlet_node() const { return x_hi_; }

    bool contains(double x) const { return x >= x_lo_ && x <= x_hi_; }

    std::vector<double> node_values() const;

    /// Refinement nesting: every node of this grid is a node of the h/2 grid.
    Grid1D refined() const { return uniform(x_lo_, x_hi_, h_ / 2.0); }

  private:
    double x_lo_ = 0.0;
    double x_hi_ = 1.0;
    double h_ = 1.0;
    std::size_t nodes_ = 1;
};

}  // namespace hjbqvi

#endif  // HJBQVI_GRID_HPP
