#include "sl2lab/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "sl2lab/cocycle.hpp"
#include "sl2lab/error.hpp"
#include "sl2lab/parallel.hpp"

namespace sl2lab {

int worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> uniform_nodes(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "grid needs at least one node");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = static_cast<double>(k) / n;
  return out;
}

TorusGrid TorusGrid::uniform(int dim, int per_axis) {
  if (dim < 1 || per_axis < 1) throw Error(Errc::InvalidArgument, "uniform grid needs dim >= 1 and nodes >= 1");
  TorusGrid g;
  g.dim = dim;
  g.shape.assign(static_cast<std::size_t>(dim), per_axis);
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(per_axis);
  g.points.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = static_cast<double>(idx[static_cast<std::size_t>(j)]) / per_axis;
    g.points.push_back(x);
    for (int j = dim - 1; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < per_axis) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
  return g;
}

TorusGrid TorusGrid::orbit(const Eigen::VectorXd& alpha, const Eigen::VectorXd& x0, int count) {
  if (count < 1 || alpha.size() != x0.size()) throw Error(Errc::InvalidArgument, "orbit grid needs count >= 1");
  TorusGrid g;
  g.dim = static_cast<int>(alpha.size());
  g.points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) g.points.push_back(reduce_mod1(x0 + static_cast<double>(k) * alpha));
  return g;
}

TorusGrid TorusGrid::standard(const Eigen::VectorXd& alpha, int nodes) {
  const int d = static_cast<int>(alpha.size());
  if (d == 1) return uniform(1, nodes);
  if (d == 2) return uniform(2, std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(nodes))))));
  return orbit(alpha, Eigen::VectorXd::Zero(d), nodes);
}

}  // namespace sl2lab
