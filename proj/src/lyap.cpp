#include "sl2lab/lyap.hpp"

#include "sl2lab/parallel.hpp"

namespace sl2lab {

LyapEstimate lyapunov_orbit(const Cocycle& c, const Eigen::VectorXd& x0, long n) {
  if (x0.size() != c.dim()) throw Error(Errc::InvalidArgument, "start point dimension mismatch");
  return lyapunov_of_sequence<double>([&](long k) { return c.eval_real(orbit_point(x0, c.alpha, k)); }, n);
}

LyapEstimate lyapunov_orbit_complex(const Cocycle& c, const Eigen::VectorXd& x0, long n) {
  if (x0.size() != c.dim()) throw Error(Errc::InvalidArgument, "start point dimension mismatch");
  return lyapunov_of_sequence<Complex>(
      [&](long k) { return c.eval(Eigen::VectorXcd(orbit_point(x0, c.alpha, k).cast<Complex>())); }, n);
}

double lyapunov_upper(const Cocycle& c, long n, const TorusGrid& grid) {
  if (n < 1) throw Error(Errc::InvalidArgument, "lyapunov_upper needs n >= 1");
  if (grid.dim != c.dim()) throw Error(Errc::InvalidArgument, "grid dimension mismatch");
  const auto logs = parallel_map<double>(grid.size(), [&](std::size_t i) {
    const ScaledMat<double> a = iterate(c, grid.points[i], n);
    return a.log_scale + std::log(spectral_norm(a.m));
  });
  double s = 0.0;
  for (double v : logs) s += v;
  return s / (static_cast<double>(n) * static_cast<double>(grid.size()));
}

double herman_average_rhs(const CocycleExpr& a, const TorusGrid& grid) {
  if (grid.dim != a.dim()) throw Error(Errc::InvalidArgument, "grid dimension mismatch");
  const auto vals = parallel_map<double>(grid.size(), [&](std::size_t i) {
    const double nrm = spectral_norm(a.eval_real(grid.points[i]));
    return std::log(0.5 * (nrm + 1.0 / nrm));
  });
  double s = 0.0;
  for (double v : vals) s += v;
  return s / static_cast<double>(grid.size());
}

double lyapunov_theta_average(const Cocycle& c, int theta_points, long n, const Eigen::VectorXd& x0) {
  if (theta_points < 1) throw Error(Errc::InvalidArgument, "theta grid needs at least one point");
  const auto vals = parallel_map<double>(static_cast<std::size_t>(theta_points), [&](std::size_t j) {
    const Mat2R r = rotation(static_cast<double>(j) / theta_points);
    return lyapunov_of_sequence<double>([&](long k) { return Mat2R(r * c.eval_real(orbit_point(x0, c.alpha, k))); }, n)
        .value;
  });
  double s = 0.0;
  for (double v : vals) s += v;
  return s / theta_points;
}

}  // namespace sl2lab
