#include "sl2lab/rotnum.hpp"

#include "sl2lab/parallel.hpp"

namespace sl2lab {

PathLift delta_xi(const MatrixPath& gamma, Complex z0, Complex z1, int steps) {
  if (steps < 1) throw Error(Errc::InvalidArgument, "path needs at least one step");
  for (int m = steps;; m *= 2) {
    Complex prev = tau(disk_coords(gamma(0.0)), z0);
    const Complex first = prev;
    double total = 0.0;
    bool resolved = true;
    for (int i = 1; i <= m; ++i) {
      const double t = static_cast<double>(i) / m;
      const Complex cur = tau(disk_coords(gamma(t)), (1.0 - t) * z0 + t * z1);
      const double s = phase_step(prev, cur);
      if (std::abs(s) >= kPathIncrementTarget) {
        resolved = false;
        break;
      }
      total += s;
      prev = cur;
    }
    if (resolved) return {Complex(total, (std::log(std::abs(first)) - std::log(std::abs(prev))) / kTwoPi), m};
    if (2L * m > kPathStepsMax)
      throw Error(Errc::UnwrapStep, "tau lift not resolved with " + std::to_string(m) + " path steps");
  }
}

RotVariation variation_rho(const Family& f, Complex theta_a, Complex theta_b, const Eigen::VectorXd& x0, long n,
                           int steps, Complex z0, Complex z1) {
  if (n < 1) throw Error(Errc::InvalidArgument, "variation needs n >= 1");
  if (x0.size() != f.dim()) throw Error(Errc::InvalidArgument, "start point dimension mismatch");
  const std::size_t count = static_cast<std::size_t>(n);
  std::vector<Eigen::VectorXcd> xs(count);
  std::vector<Complex> za(count), zb(count);
  for (std::size_t k = 0; k < count; ++k) {
    xs[k] = orbit_point(x0, f.alpha(), static_cast<long>(k)).cast<Complex>();
    za[k] = z0;
    zb[k] = z1;
    z0 = mobius(disk_coords(f.eval(xs[k], theta_a)), z0);
    z1 = mobius(disk_coords(f.eval(xs[k], theta_b)), z1);
  }
  const auto lifts = parallel_map<PathLift>(count, [&](std::size_t k) {
    const Eigen::VectorXcd& x = xs[k];
    return delta_xi([&](double t) { return f.eval(x, theta_a + t * (theta_b - theta_a)); }, za[k], zb[k], steps);
  });
  Complex sum(0.0);
  int used = 0;
  for (const auto& l : lifts) {
    sum += l.value;
    used = std::max(used, l.steps);
  }
  RotVariation out;
  out.n = n;
  out.delta_rho = sum.real() / static_cast<double>(n);
  out.delta_L = kTwoPi * sum.imag() / static_cast<double>(n);
  out.path_steps = used;
  out.tolerance = 1.0 / static_cast<double>(n);
  return out;
}

std::vector<ProfilePoint> rho_profile(const Family& f, const std::vector<double>& thetas, const Eigen::VectorXd& x0,
                                      long n, double imag_level) {
  if (thetas.empty()) return {};
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1])) throw Error(Errc::InvalidArgument, "theta grid must be increasing");
  const Complex shift(0.0, imag_level);
  const auto pieces = parallel_map<RotVariation>(thetas.size() - 1, [&](std::size_t i) {
    return variation_rho(f, thetas[i] + shift, thetas[i + 1] + shift, x0, n);
  });
  std::vector<ProfilePoint> out;
  out.push_back({thetas[0], 0.0, 0.0});
  for (std::size_t i = 0; i < pieces.size(); ++i)
    out.push_back({thetas[i + 1], out.back().rho + pieces[i].delta_rho, out.back().tolerance + pieces[i].tolerance});
  return out;
}

FiberedRotation fibered_rotation_number(const Cocycle& c, const Eigen::VectorXd& x0, long n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "rotation number needs N >= 1");
  Eigen::Vector2d y(1.0, 0.0);
  double total = 0.0;
  for (long k = 0; k < n; ++k) {
    const Eigen::Vector2d ay = c.eval_real(orbit_point(x0, c.alpha, k)) * y;
    total += phase_step(Complex(y[0], y[1]), Complex(ay[0], ay[1]));
    y = ay.normalized();
  }
  FiberedRotation out;
  out.lift_slope = total / static_cast<double>(n);
  out.value_mod1 = out.lift_slope - std::floor(out.lift_slope);
  return out;
}

AffineFit affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidArgument, "affine fit needs >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(Errc::InvalidArgument, "affine fit needs distinct abscissae");
  AffineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
  return fit;
}

}  // namespace sl2lab
