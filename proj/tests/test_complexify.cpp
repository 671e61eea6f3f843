#include <doctest.h>

#include "sl2lab/complexify.hpp"
#include "sl2lab/io.hpp"
#include "test_util.hpp"

using namespace sl2lab;
using sl2lab::testing::uniform;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

/// Composite Simpson rule for int x^k K(x) dx, independent of the kernel's own grid.
Complex simpson_moment(const AHKernel& k, int power, int intervals = 20000) {
  const double a = -k.halfwidth, h = 2.0 * k.halfwidth / intervals;
  Complex s(0.0);
  for (int i = 0; i <= intervals; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(x, power) * k(x);
  }
  return s * h / 3.0;
}

Eigen::VectorXd cos_samples(int n) {
  Eigen::VectorXd f(n);
  for (int j = 0; j < n; ++j) f[j] = std::cos(kTwoPi * j / n);
  return f;
}

double slope(const std::vector<double>& t, const std::vector<double>& e) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(e[i]));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("kernel moments") {
  for (double eta : {1.0, 1.5, 2.0, 3.0}) {
    const AHKernel k = ah_kernel(eta);
    CHECK(k.order == static_cast<int>(std::floor(eta + 1)));
    Complex ik(1.0);
    for (int p = 0; p <= k.order; ++p, ik *= Complex(0.0, 1.0)) {
      CHECK(k.moment_residuals[static_cast<std::size_t>(p)] < 1e-8);
      CHECK(std::abs(simpson_moment(k, p) - ik) < 1e-8);
    }
    // Conjugate symmetry of the kernel.
    for (double x : {0.1, 0.37, 0.8}) CHECK(std::abs(k(-x) - std::conj(k(x))) < 1e-12);
  }
  CHECK(std::abs(simpson_moment(ah_kernel(1.0), 0).imag()) < 1e-10);
  CHECK_THROWS_AS(ah_kernel(0.5), Error);
}

TEST_CASE("extension of constants and cosines") {
  const AHKernel k = ah_kernel(1.0);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(16, 0.7);
  for (Complex z : {Complex(0.1, 0.0), Complex(0.3, 0.05), Complex(0.9, -0.2)})
    CHECK(std::abs(ah_extend_scalar(c, k, z) - 0.7) < 1e-12);

  for (double eta : {1.0, 2.0, 3.0}) {
    const AHKernel ke = ah_kernel(eta);
    const double sigma = 0.17;
    std::vector<double> ts{1e-2, 5e-3}, errs;
    for (double t : ts) {
      const Complex z(sigma, t);
      errs.push_back(std::abs(ah_extend_scalar(cos_samples(64), ke, z) - std::cos(kTwoPi * z)));
    }
    // Error is O(t^(order+1)): at least the promised O(t^order).
    CHECK(errs[0] < 1e-3);
    CHECK(slope(ts, errs) > ke.order - 0.3);
    // First-order Taylor agreement.
    const double t = 1e-2;
    const Complex taylor = std::cos(kTwoPi * sigma) - Complex(0.0, kTwoPi * t) * std::sin(kTwoPi * sigma);
    CHECK(std::abs(ah_extend_scalar(cos_samples(64), ke, Complex(sigma, t)) - taylor) < 50.0 * t * t);
  }
}

TEST_CASE("dbar residual: closed form against finite differences") {
  const double h = 1e-5;
  for (double eta : {1.0, 2.0, 3.0}) {
    const AHKernel k = ah_kernel(eta);
    const ScalarSpectrum s = ScalarSpectrum::from_samples(cos_samples(32));
    std::vector<double> ts{0.1, 0.05, 0.025}, res;
    for (double t : ts) {
      const Complex z(0.23, t);
      const Complex ds = (s.extend(k, z + h) - s.extend(k, z - h)) / (2.0 * h);
      const Complex dt = (s.extend(k, z + Complex(0.0, h)) - s.extend(k, z - Complex(0.0, h))) / (2.0 * h);
      const Complex fd = 0.5 * (ds + Complex(0.0, 1.0) * dt);
      const Complex exact = s.dbar(k, z);
      CHECK(std::abs(fd - exact) < 1e-7 + 1e-3 * std::abs(exact));
      res.push_back(std::abs(exact));
    }
    // With moments through order floor(eta + 1) the Taylor cancellation leaves
    // dbar = O(t^order) on trigonometric data.
    CHECK(std::abs(slope(ts, res) - k.order) < 0.3);
  }
}

TEST_CASE("undersampled spectra are rejected") {
  Eigen::VectorXd f(16);
  for (int j = 0; j < 16; ++j) f[j] = std::cos(kTwoPi * 7 * j / 16.0);
  CHECK_THROWS_AS(ScalarSpectrum::from_samples(f), Error);
}

TEST_CASE("matrix extension") {
  const AHKernel k = ah_kernel(2.0);
  const CocycleExpr rot = CocycleExpr::rot(TrigPoly::linear(v1(1.0)) + TrigPoly::cosine({1}, 0.1));
  const SampledMatrix m = SampledMatrix::from_function(256, [&](double x) { return rot.eval_real(v1(x)); });

  // t = 0 reproduces the samples, unimodular.
  for (int j : {0, 17, 100}) {
    const Mat2C e = ah_extend_matrix(m, k, Complex(j / 256.0, 0.0));
    CHECK((e - rot.eval_real(v1(j / 256.0)).cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(e.determinant() - 1.0) < 1e-12);
  }
  // Agreement with the analytic continuation at order t^(order+1).
  std::vector<double> ts{0.02, 0.01}, errs;
  for (double t : ts) {
    double worst = 0.0;
    for (double sigma : {0.0, 0.21, 0.6}) {
      const Mat2C e = ah_extend_matrix(m, k, Complex(sigma, t));
      const Mat2C a = rot.eval(Eigen::VectorXcd::Constant(1, Complex(sigma, t)));
      worst = std::max(worst, (e - a).cwiseAbs().maxCoeff());
      CHECK(std::abs(e.determinant() - 1.0) < 1e-12);
      // Real symmetry.
      const Mat2C mirror = ah_extend_matrix(m, k, Complex(sigma, -t));
      CHECK((mirror - e.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
    }
    errs.push_back(worst);
  }
  CHECK(errs[0] < 1e-3);
  CHECK(slope(ts, errs) > k.order - 0.3);
}

TEST_CASE("strip width of the phase-complexified rotation model") {
  const Family f = Family::phase_shift(Cocycle(v1(kGoldenMean), rotation_model({1})), v1(1.0));
  const StripCocycle s = StripCocycle::analytic(f);
  const TorusGrid g = TorusGrid::uniform(1, 16);
  const std::vector<double> sig = uniform_nodes(8);
  const LevelProbe p = probe_level(s, 0.05, StripSide::Lower, sig, g);
  CHECK(p.contracts);
  CHECK(std::abs(p.worst - std::exp(-4.0 * M_PI * 0.05)) < 1e-12);
  CHECK(std::abs(p.worst - 0.5335) < 1e-4);
  CHECK(std::abs(p.epsilon_hat - kTwoPi) < 1e-10);
  CHECK_FALSE(probe_level(s, 0.05, StripSide::Upper, sig, g).contracts);

  const StripReport r = strip_width(s, 0.1, sig, g);
  CHECK(r.side == StripSide::Lower);
  CHECK(r.delta == 0.1);
}

TEST_CASE("RotTwist strips and Schroedinger energies") {
  const TorusGrid g = TorusGrid::uniform(1, 32);
  const std::vector<double> sig = uniform_nodes(8);
  for (double lambda : {2.0, 5.0}) {
    const Family f = Family::rot_twist(Cocycle(v1(kGoldenMean), herman(lambda, {1})));
    const StripReport r = strip_width(StripCocycle::analytic(f), 0.1, sig, g);
    CHECK(r.delta > 0.0);
    CHECK(r.side == StripSide::Lower);
    CHECK(std::abs(r.epsilon_hat - kTwoPi) < 1e-9);
    // Grid doubling never shrinks delta by more than one dyadic step.
    const StripReport fine = strip_width(StripCocycle::analytic(f), 0.1, uniform_nodes(16), TorusGrid::uniform(1, 64));
    CHECK(fine.delta >= 0.5 * r.delta);

    // AH extension in theta agrees with the analytic strip.
    const StripCocycle ah = StripCocycle::ah(f, ah_kernel(2.0), 16);
    const Mat2C e = ah.eval_at_level(v1(0.3), 0.4, 0.05, StripSide::Lower);
    const Mat2C a = f.eval(Eigen::VectorXcd::Constant(1, Complex(0.3)), Complex(0.4, -0.05));
    CHECK((e - a).cwiseAbs().maxCoeff() < 1e-3);
  }

  const Family energy = schrodinger_energy_family(TrigPoly::cosine({1}, 1.0), v1(kGoldenMean));
  std::vector<double> es{-1.0, 0.0, 0.5};
  CHECK_THROWS_WITH_AS(strip_width(StripCocycle::analytic(energy), 0.1, es, g, 6), doctest::Contains("NoContraction"), Error);

  CHECK_THROWS_AS(StripCocycle::ah(energy, ah_kernel(1.0), 16), Error);
}

TEST_CASE("sampled cocycle extension") {
  const SampledMatrix m = SampledMatrix::from_function(64, [](double x) { return Mat2R(rotation(x)); });
  const StripCocycle s = ah_extend_cocycle(m, ah_kernel(2.0), v1(kGoldenMean));
  const Mat2C e = s.eval(v1(0.1), Complex(0.2, 0.02));
  const Mat2C a = rotation(Complex(0.3, 0.02));
  CHECK((e - a).cwiseAbs().maxCoeff() < 1e-4);
}
