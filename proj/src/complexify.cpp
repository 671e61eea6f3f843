#include "sl2lab/complexify.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sl2lab/parallel.hpp"
#include "sl2lab/spectral.hpp"

namespace sl2lab {

namespace {

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

/// Steps used to continue the square-root branch from t = 0.
constexpr int kBranchSteps = 8;

}  // namespace

Complex AHKernel::operator()(double x) const {
  if (std::abs(x) >= halfwidth) return 0.0;
  Complex p(0.0);
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * x + *it;
  return p * bump(x / halfwidth);
}

Complex AHKernel::transform(double xi, int j) const {
  const double w = 2.0 * halfwidth / kKernelQuadNodes;
  Complex sum(0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    sum += samples[i] * (j == 0 ? 1.0 : std::pow(x, j)) * std::polar(1.0, kTwoPi * xi * x);
  }
  return w * sum;
}

AHKernel ah_kernel(double eta, double halfwidth) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw Error(Errc::InvalidArgument, "kernel order needs eta >= 1");
  if (!(halfwidth > 0.0)) throw Error(Errc::InvalidArgument, "kernel halfwidth must be positive");
  AHKernel k;
  k.eta = eta;
  k.halfwidth = halfwidth;
  k.order = static_cast<int>(std::floor(eta + 1.0));
  const int m = k.order + 1;
  const double w = 2.0 * halfwidth / kKernelQuadNodes;
  std::vector<double> b;
  for (int i = 1; i < kKernelQuadNodes; ++i) {
    const double x = -halfwidth + i * w;
    k.nodes.push_back(x);
    b.push_back(bump(x / halfwidth));
  }
  // Hankel system sum_j p_j mu_{k+j} = i^k with mu the bump moments.
  std::vector<double> mu(static_cast<std::size_t>(2 * m - 1), 0.0);
  for (std::size_t i = 0; i < k.nodes.size(); ++i) {
    double xp = w * b[i];
    for (auto& v : mu) {
      v += xp;
      xp *= k.nodes[i];
    }
  }
  Eigen::MatrixXd h(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) h(r, c) = mu[static_cast<std::size_t>(r + c)];
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(h).singularValues();
  k.condition = sv[0] / sv[m - 1];
  if (!(k.condition <= kKernelConditionMax))
    throw Error(Errc::IllConditioned, "moment system condition number " + std::to_string(k.condition));
  Eigen::VectorXcd rhs(m);
  Complex ik(1.0);
  for (int r = 0; r < m; ++r, ik *= Complex(0.0, 1.0)) rhs[r] = ik;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  const Eigen::VectorXd re = qr.solve(rhs.real()), im = qr.solve(rhs.imag());
  for (int j = 0; j < m; ++j) k.poly.emplace_back(re[j], im[j]);
  for (std::size_t i = 0; i < k.nodes.size(); ++i) k.samples.push_back(k(k.nodes[i]));
  ik = 1.0;
  for (int r = 0; r < m; ++r, ik *= Complex(0.0, 1.0)) {
    Complex s(0.0);
    for (std::size_t i = 0; i < k.nodes.size(); ++i) s += w * k.samples[i] * std::pow(k.nodes[i], r);
    k.moment_residuals.push_back(std::abs(s - ik));
  }
  return k;
}

ScalarSpectrum ScalarSpectrum::from_samples(const Eigen::VectorXd& samples) {
  const auto n = static_cast<std::size_t>(samples.size());
  if (n == 0 || !samples.allFinite()) throw Error(Errc::InvalidArgument, "samples must be finite and nonempty");
  const auto c = fourier_coefficients(std::vector<Complex>(samples.data(), samples.data() + n));
  double peak = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const long k = i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    peak = std::max(peak, std::abs(c[i]));
    if (4 * std::abs(k) > static_cast<long>(n)) tail = std::max(tail, std::abs(c[i]));
  }
  if (tail > kSpectralTailTol * peak)
    throw Error(Errc::Undersampled, "sample spectrum not resolved (tail ratio " + std::to_string(tail / peak) + ")");
  ScalarSpectrum s;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(c[i]) <= 1e-17 * peak) continue;
    const long k = i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    if (n % 2 == 0 && i == n / 2) {
      s.modes.emplace_back(static_cast<double>(k), 0.5 * c[i]);
      s.modes.emplace_back(-static_cast<double>(k), 0.5 * c[i]);
    } else {
      s.modes.emplace_back(static_cast<double>(k), c[i]);
    }
  }
  return s;
}

Complex ScalarSpectrum::extend(const AHKernel& k, Complex z) const {
  Complex sum(0.0);
  for (const auto& [mode, c] : modes) sum += c * std::polar(1.0, kTwoPi * mode * z.real()) * k.transform(mode * z.imag());
  return sum;
}

Complex ScalarSpectrum::dbar(const AHKernel& k, Complex z) const {
  const Complex i(0.0, 1.0);
  Complex ds(0.0), dt(0.0);
  for (const auto& [mode, c] : modes) {
    const Complex e = c * std::polar(1.0, kTwoPi * mode * z.real());
    ds += e * (kTwoPi * mode * i) * k.transform(mode * z.imag());
    dt += e * (kTwoPi * mode * i) * k.transform(mode * z.imag(), 1);
  }
  return 0.5 * (ds + i * dt);
}

Complex ah_extend_scalar(const Eigen::VectorXd& samples, const AHKernel& k, Complex z) {
  return ScalarSpectrum::from_samples(samples).extend(k, z);
}

Complex ah_dbar(const Eigen::VectorXd& samples, const AHKernel& k, Complex z) {
  return ScalarSpectrum::from_samples(samples).dbar(k, z);
}

SampledMatrix SampledMatrix::from_function(int n, const std::function<Mat2R(double)>& f) {
  if (n < 1) throw Error(Errc::InvalidArgument, "need at least one sample");
  SampledMatrix m{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    const Mat2R v = f(static_cast<double>(j) / n);
    m.a[j] = v(0, 0);
    m.b[j] = v(0, 1);
    m.c[j] = v(1, 0);
    m.d[j] = v(1, 1);
  }
  return m;
}

Mat2C ah_extend_matrix(const std::vector<ScalarSpectrum>& abcd, const AHKernel& k, Complex z) {
  auto raw = [&](Complex w) {
    Mat2C m;
    m << abcd[0].extend(k, w), abcd[1].extend(k, w), abcd[2].extend(k, w), abcd[3].extend(k, w);
    return m;
  };
  Complex factor(1.0);
  Mat2C m;
  const int steps = z.imag() == 0.0 ? 1 : kBranchSteps;
  for (int j = 1; j <= steps; ++j) {
    m = raw(Complex(z.real(), z.imag() * j / steps));
    if (std::abs(m.determinant()) < kDetVanishTol)
      throw Error(Errc::DetVanishes, "extended determinant vanishes at Im = " + std::to_string(z.imag() * j / steps));
    factor = repair_determinant(m, factor);
  }
  return m;
}

Mat2C ah_extend_matrix(const SampledMatrix& m, const AHKernel& k, Complex z) {
  const std::vector<ScalarSpectrum> abcd{ScalarSpectrum::from_samples(m.a), ScalarSpectrum::from_samples(m.b),
                                         ScalarSpectrum::from_samples(m.c), ScalarSpectrum::from_samples(m.d)};
  return ah_extend_matrix(abcd, k, z);
}

const char* side_name(StripSide s) { return s == StripSide::Upper ? "upper" : "lower"; }

StripCocycle StripCocycle::analytic(Family f) {
  StripCocycle s;
  s.mode_ = ExtensionMode::Analytic;
  s.alpha_ = f.alpha();
  s.family_ = std::move(f);
  return s;
}

StripCocycle StripCocycle::ah(Family f, AHKernel k, int theta_samples) {
  if (theta_samples < 4) throw Error(Errc::InvalidArgument, "AH extension needs at least 4 theta samples");
  const bool periodic =
      f.kind() == Family::Kind::RotTwist ||
      (f.kind() == Family::Kind::PhaseShift && (f.w().array() == f.w().array().round()).all());
  if (!periodic) throw Error(Errc::InvalidArgument, "AH extension in theta needs a 1-periodic family");
  StripCocycle s;
  s.mode_ = ExtensionMode::AH;
  s.alpha_ = f.alpha();
  s.family_ = std::move(f);
  s.kernel_ = std::move(k);
  s.theta_samples_ = theta_samples;
  return s;
}

StripCocycle StripCocycle::sampled(Eigen::VectorXd alpha, const SampledMatrix& entries, AHKernel k) {
  if (alpha.size() != 1) throw Error(Errc::InvalidArgument, "sampled cocycles live over the circle");
  StripCocycle s;
  s.mode_ = ExtensionMode::AH;
  s.alpha_ = std::move(alpha);
  s.entries_ = {ScalarSpectrum::from_samples(entries.a), ScalarSpectrum::from_samples(entries.b),
                ScalarSpectrum::from_samples(entries.c), ScalarSpectrum::from_samples(entries.d)};
  s.kernel_ = std::move(k);
  return s;
}

Mat2C StripCocycle::eval(const Eigen::VectorXd& x, Complex theta) const {
  if (x.size() != alpha_.size()) throw Error(Errc::InvalidArgument, "point dimension mismatch");
  if (!entries_.empty()) return ah_extend_matrix(entries_, *kernel_, x[0] + theta);
  if (mode_ == ExtensionMode::Analytic) return family_->eval(x.cast<Complex>(), theta);
  const SampledMatrix m = SampledMatrix::from_function(theta_samples_, [&](double th) { return family_->eval_real(x, th); });
  return ah_extend_matrix(m, *kernel_, theta);
}

StripCocycle ah_extend_cocycle(const SampledMatrix& m, const AHKernel& k, const Eigen::VectorXd& alpha) {
  return StripCocycle::sampled(alpha, m, k);
}

LevelProbe probe_level(const StripCocycle& s, double t, StripSide side, const std::vector<double>& sigmas,
                       const TorusGrid& xgrid) {
  if (!(t > 0.0)) throw Error(Errc::InvalidArgument, "strip level must be positive");
  if (sigmas.empty() || xgrid.size() == 0) throw Error(Errc::InvalidArgument, "strip probe needs nonempty grids");
  const std::size_t nx = xgrid.size();
  const auto worst = parallel_map<double>(nx * sigmas.size(), [&](std::size_t i) {
    const Mat2C m = s.eval_at_level(xgrid.points[i % nx], sigmas[i / nx], t, side);
    try {
      const auto disk = mobius_image_disk(Mat2C(disk_coords(m)));
      return std::abs(disk.center) + disk.radius;
    } catch (const Error& e) {
      if (e.code() != Errc::PoleOnCircle) throw;
      return std::numeric_limits<double>::infinity();
    }
  });
  LevelProbe p;
  p.t = t;
  p.worst = *std::max_element(worst.begin(), worst.end());
  p.contracts = p.worst < 1.0 - kContainmentMargin;
  p.epsilon_hat = -std::log(p.worst) / (2.0 * t);
  return p;
}

StripReport strip_width(const StripCocycle& s, double tmax, const std::vector<double>& sigmas, const TorusGrid& xgrid,
                        int max_halvings) {
  if (!(tmax > 0.0) || max_halvings < 0) throw Error(Errc::InvalidArgument, "strip search needs tmax > 0");
  StripReport best;
  bool found = false;
  for (StripSide side : {StripSide::Lower, StripSide::Upper}) {
    std::vector<LevelProbe> probes;
    for (int j = 0; j <= max_halvings; ++j) {
      probes.push_back(probe_level(s, std::ldexp(tmax, -j), side, sigmas, xgrid));
      if (probes.back().contracts) break;
    }
    if (!probes.back().contracts) continue;
    if (!found || probes.back().t > best.delta) {
      best.delta = probes.back().t;
      best.side = side;
      best.epsilon_hat = probes.back().epsilon_hat;
      best.probes = probes;
      found = true;
    }
  }
  if (!found)
    throw Error(Errc::NoContraction, "neither side contracts down to t = " + std::to_string(std::ldexp(tmax, -max_halvings)));
  return best;
}

StripCocycle certify_strip(StripCocycle s, double tmax, const std::vector<double>& sigmas, const TorusGrid& xgrid,
                           StripReport* report) {
  const StripReport r = strip_width(s, tmax, sigmas, xgrid);
  s.delta = r.delta;
  s.side = r.side;
  s.certified = true;
  if (report) *report = r;
  return s;
}

}  // namespace sl2lab
