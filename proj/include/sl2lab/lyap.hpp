#pragma once

#include "sl2lab/cocycle.hpp"
#include "sl2lab/family.hpp"
#include "sl2lab/grid.hpp"

namespace sl2lab {

struct LyapEstimate {
  double value = 0.0;        // nats per iterate
  long n = 0;
  double error_proxy = 0.0;  // |estimate(n) - estimate(n/2)|
};

/// (1/N) ln ||A(k_{N-1}) ... A(k_0)|| for an arbitrary matrix sequence k -> matrix_at(k).
/// The product is carried as a ScaledMat, so both columns (the two tracked
/// vectors) stay representable for any N; the norm is that of the worst-case vector.
template <typename Scalar, typename MatrixAt>
LyapEstimate lyapunov_of_sequence(MatrixAt&& matrix_at, long n) {
  if (n < 2) throw Error(Errc::InvalidArgument, "Lyapunov estimate needs N >= 2");
  ScaledMat<Scalar> prod;
  const long half = n / 2;
  double at_half = 0.0;
  for (long k = 0; k < n; ++k) {
    prod.left_multiply(matrix_at(k));
    if (k + 1 == half) at_half = (prod.log_scale + std::log(spectral_norm(prod.m))) / static_cast<double>(half);
  }
  LyapEstimate out;
  out.n = n;
  out.value = (prod.log_scale + std::log(spectral_norm(prod.m))) / static_cast<double>(n);
  out.error_proxy = std::abs(out.value - at_half);
  return out;
}

LyapEstimate lyapunov_orbit(const Cocycle& c, const Eigen::VectorXd& x0, long n);
/// Orbit estimate for a cocycle with complex coefficients (complexified parameter),
/// evaluated along the real orbit of x0.
LyapEstimate lyapunov_orbit_complex(const Cocycle& c, const Eigen::VectorXd& x0, long n);

/// (1/n) * grid mean of ln ||A_n(x)||; an upper bound for L up to quadrature error.
double lyapunov_upper(const Cocycle& c, long n, const TorusGrid& grid);

/// Grid mean of ln((||A(x)|| + ||A(x)||^{-1}) / 2), spectral norm.
double herman_average_rhs(const CocycleExpr& a, const TorusGrid& grid);

/// Mean over theta = j / theta_points of lyapunov_orbit(R_theta A).
double lyapunov_theta_average(const Cocycle& c, int theta_points, long n, const Eigen::VectorXd& x0);

}  // namespace sl2lab
