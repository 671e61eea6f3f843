#pragma once

#include <Eigen/Core>
#include <vector>

namespace sl2lab {

/// Quadrature nodes on the d-torus with equal weights. Uniform tensor grids are
/// used for d = 1 (the trapezoid rule is exact on trigonometric polynomials up to
/// aliasing); orbit grids x0 + k alpha serve as quasi-Monte Carlo nodes for d >= 2.
struct TorusGrid {
  int dim = 1;
  std::vector<Eigen::VectorXd> points;
  /// Nodes per axis for tensor grids, empty for orbit grids.
  std::vector<int> shape;

  static TorusGrid uniform(int dim, int per_axis);
  static TorusGrid orbit(const Eigen::VectorXd& alpha, const Eigen::VectorXd& x0, int count);
  /// Uniform for d = 1 and d = 2 tensor grids with `nodes` total (rounded), orbit otherwise.
  static TorusGrid standard(const Eigen::VectorXd& alpha, int nodes);

  std::size_t size() const { return points.size(); }
  bool is_tensor() const { return !shape.empty(); }
};

/// k / n for k = 0..n-1.
std::vector<double> uniform_nodes(int n);

}  // namespace sl2lab
