#include "sl2lab/section.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <limits>
#include <tuple>

#include "sl2lab/parallel.hpp"
#include "sl2lab/spectral.hpp"

namespace sl2lab {

namespace {

double max_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, hyperbolic_distance(a[j], b[j]));
  return d;
}

/// Fixed point of m(x_j) = M_j . m(x_j + shift) by iteration from 0.
std::pair<std::vector<Complex>, int> graph_transform(const std::vector<Mat2C>& mats, const TorusGrid& grid,
                                                     const Eigen::VectorXd& shift, double tol) {
  std::vector<Complex> m(grid.size(), Complex(0.0));
  double prev = 0.0;
  int slow = 0;
  for (int it = 1; it <= kSectionMaxIterations; ++it) {
    const std::vector<Complex> moved = periodic_shift(m, grid.shape, shift);
    std::vector<Complex> next(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      next[j] = mobius(mats[j], moved[j]);
      if (!(std::abs(next[j]) < 1.0))
        throw Error(Errc::SlowContraction, "section left the disk; level not inside the certified strip");
    }
    const double d = max_distance(next, m);
    m = std::move(next);
    if (d < tol) return {m, it};
    // Sustained near-isometric updates: the strip level is too close to the axis.
    if (it > 64 && d > kSlowContractionRatio * prev) {
      if (++slow > 64) throw Error(Errc::SlowContraction, "graph transform update ratio above 1 - 1e-4");
    } else {
      slow = 0;
    }
    prev = d;
  }
  throw Error(Errc::SlowContraction, "graph transform did not converge");
}

std::vector<Mat2C> disk_matrices(const StripCocycle& s, const TorusGrid& grid, const Eigen::VectorXd& offset,
                                 Complex theta, bool invert) {
  return parallel_map<Mat2C>(grid.size(), [&](std::size_t j) {
    const Mat2C a = disk_coords(s.eval(reduce_mod1(grid.points[j] + offset), theta));
    return invert ? inverse_unimodular(a) : a;
  });
}

void check_grid(const StripCocycle& s, const TorusGrid& grid, double t) {
  if (!grid.is_tensor()) throw Error(Errc::InvalidArgument, "sections need a uniform tensor grid");
  if (grid.dim != s.dim()) throw Error(Errc::InvalidArgument, "grid dimension does not match the cocycle");
  if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "section level must be positive");
}

}  // namespace

DiskSection invariant_section(const StripCocycle& s, double sigma, double t, StripSide side, const TorusGrid& grid,
                              double tol) {
  check_grid(s, grid, t);
  const Complex theta(sigma, side_sign(side) * t);
  const Eigen::VectorXd& alpha = s.alpha();
  const auto back = disk_matrices(s, grid, -alpha, theta, false);
  DiskSection out;
  out.grid = grid;
  out.kind = SectionKind::Forward;
  out.sigma = sigma;
  out.t = t;
  out.side = side;
  std::tie(out.values, out.iterations) = graph_transform(back, grid, -alpha, tol);
  // Defect m(x + alpha) vs A(x) m(x) at every node.
  const auto here = disk_matrices(s, grid, Eigen::VectorXd::Zero(s.dim()), theta, false);
  const auto ahead = periodic_shift(out.values, grid.shape, alpha);
  std::vector<Complex> pushed(grid.size());
  for (std::size_t j = 0; j < pushed.size(); ++j) pushed[j] = mobius(here[j], out.values[j]);
  out.residual = max_distance(ahead, pushed);
  return out;
}

DiskSection invariant_section_minus(const StripCocycle& s, double sigma, double t, StripSide side,
                                    const TorusGrid& grid, double tol) {
  check_grid(s, grid, t);
  const Complex theta(sigma, -side_sign(side) * t);
  const Eigen::VectorXd& alpha = s.alpha();
  const auto inv = disk_matrices(s, grid, Eigen::VectorXd::Zero(s.dim()), theta, true);
  DiskSection out;
  out.grid = grid;
  out.kind = SectionKind::Backward;
  out.sigma = sigma;
  out.t = t;
  out.side = side;
  std::tie(out.values, out.iterations) = graph_transform(inv, grid, alpha, tol);
  const auto ahead = periodic_shift(out.values, grid.shape, alpha);
  std::vector<Complex> pulled(grid.size());
  for (std::size_t j = 0; j < pulled.size(); ++j) pulled[j] = mobius(inv[j], ahead[j]);
  out.residual = max_distance(out.values, pulled);
  return out;
}

SectionLyapunov section_lyapunov(const StripCocycle& s, const DiskSection& m) {
  if (m.kind != SectionKind::Forward) throw Error(Errc::InvalidArgument, "Lyapunov quadrature needs the forward section");
  const Complex theta(m.sigma, side_sign(m.side) * m.t);
  const auto mats = disk_matrices(s, m.grid, Eigen::VectorXd::Zero(s.dim()), theta, false);
  SectionLyapunov out;
  for (std::size_t j = 0; j < mats.size(); ++j) {
    const Complex z = m.values[j];
    const Complex ta = tau(mats[j], z);
    const Complex zt = mobius(mats[j], z);
    out.tau_form += std::log(std::abs(ta));
    // -(1/2) ln q with q = |tau|^{-2} (1 - |z|^2) / (1 - |z~|^2).
    out.q_form += std::log(std::abs(ta)) - 0.5 * std::log1p(-std::norm(z)) + 0.5 * std::log1p(-std::norm(zt));
  }
  const double n = static_cast<double>(mats.size());
  out.tau_form /= n;
  out.q_form /= n;
  return out;
}

KotaniIntegrals kotani_integrals(const DiskSection& plus, const DiskSection& minus) {
  if (plus.values.size() != minus.values.size() || plus.grid.shape != minus.grid.shape)
    throw Error(Errc::InvalidArgument, "sections live on different grids");
  KotaniIntegrals k;
  for (std::size_t j = 0; j < plus.values.size(); ++j) {
    k.i_plus += 1.0 / (1.0 - std::norm(plus.values[j]));
    k.i_minus += 1.0 / (1.0 - std::norm(minus.values[j]));
    k.d2 += std::norm(plus.values[j] - minus.values[j]);
  }
  const double n = static_cast<double>(plus.values.size());
  k.i_plus /= n;
  k.i_minus /= n;
  k.d2 /= n;
  return k;
}

std::vector<KotaniProbe> kotani_profile(const StripCocycle& s, double sigma, const std::vector<double>& levels,
                                        const TorusGrid& grid) {
  if (!s.certified) throw Error(Errc::InvalidArgument, "Kotani probes need a certified strip");
  std::vector<KotaniProbe> out;
  for (double t : levels) {
    const DiskSection p = invariant_section(s, sigma, t, s.side, grid);
    const DiskSection m = invariant_section_minus(s, sigma, t, s.side, grid);
    out.push_back({t, kotani_integrals(p, m), p.residual, m.residual});
  }
  return out;
}

UProfile u_profile(const StripCocycle& s, const std::vector<double>& levels, const std::vector<double>& sigmas,
                   const TorusGrid& grid) {
  if (!s.certified) throw Error(Errc::InvalidArgument, "U(t) needs a certified strip");
  if (levels.size() < 2 || sigmas.empty()) throw Error(Errc::InvalidArgument, "U(t) needs >= 2 levels and sigmas");
  UProfile out;
  out.levels = levels;
  for (double t : levels) {
    if (t > s.delta * (1.0 + 1e-12)) throw Error(Errc::InvalidArgument, "level outside the certified strip");
    const auto per_sigma = parallel_map<std::pair<SectionLyapunov, double>>(sigmas.size(), [&](std::size_t i) {
      const DiskSection m = invariant_section(s, sigmas[i], t, s.side, grid);
      return std::make_pair(section_lyapunov(s, m), m.residual);
    });
    double u = 0.0, uq = 0.0, lo = std::numeric_limits<double>::infinity();
    for (const auto& [l, r] : per_sigma) {
      u += l.tau_form;
      uq += l.q_form;
      lo = std::min(lo, l.tau_form);
      out.max_residual = std::max(out.max_residual, r);
    }
    out.u.push_back(u / static_cast<double>(sigmas.size()));
    out.u_q.push_back(uq / static_cast<double>(sigmas.size()));
    out.min_section_l.push_back(lo);
    out.epsilon_hat.push_back(probe_level(s, t, s.side, sigmas, grid).epsilon_hat);
  }
  out.fit = affine_fit(out.levels, out.u);
  std::size_t top = static_cast<std::size_t>(std::max_element(levels.begin(), levels.end()) - levels.begin());
  out.relative_residual = out.fit.max_residual / std::abs(out.u[top]);
  return out;
}

SecondDerivative second_derivative_limit(const TrigPoly& s1, const TrigPoly& s2, const TrigPoly& s3,
                                         const std::vector<double>& levels, int theta_nodes) {
  if (levels.size() < 2) throw Error(Errc::InvalidArgument, "Richardson extrapolation needs two levels");
  if (s1.dim() != 1 || s2.dim() != 1 || s3.dim() != 1) throw Error(Errc::InvalidArgument, "s must live on the circle");
  const TorusGrid g = TorusGrid::uniform(1, theta_nodes);
  SecondDerivative out;
  out.levels = levels;
  for (double t : levels) {
    if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "levels must be positive");
    out.values.push_back(2.0 / (t * t) * herman_average_rhs(exp_family(s1, s2, s3, t), g));
  }
  const std::size_t n = levels.size();
  out.richardson = 2.0 * out.values[n - 1] - out.values[n - 2];
  return out;
}

DerivativeBound derivative_bound_check(const Family& f, double theta_star, double h, const Eigen::VectorXd& x0,
                                       long n, const TorusGrid& xgrid) {
  if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "difference step must be positive");
  DerivativeBound out;
  out.lyapunov = lyapunov_of_sequence<double>(
                     [&](long k) { return f.eval_real(orbit_point(x0, f.alpha(), k), theta_star); }, n)
                     .value;
  if (!(out.lyapunov < kZeroEnergyTol))
    throw Error(Errc::NotAtZeroEnergy, "L(theta*) = " + std::to_string(out.lyapunov) + " is not below 1e-3");
  const MonotonicityReport mono = monotonicity_constant(f, xgrid, {theta_star - h, theta_star, theta_star + h});
  out.monotone = mono.status;
  out.threshold = std::abs(mono.epsilon) / kTwoPi;
  const RotVariation v = variation_rho(f, theta_star - h, theta_star + h, x0, n);
  out.drho = v.delta_rho / (2.0 * h);
  out.tolerance = v.tolerance / (2.0 * h);
  out.passes = mono.certified() && std::abs(out.drho) >= out.threshold - out.tolerance;
  return out;
}

}  // namespace sl2lab
