#include <doctest.h>

#include <Eigen/LU>

#include "sl2lab/algebra.hpp"
#include "test_util.hpp"

using namespace sl2lab;
using sl2lab::testing::random_disk_point;
using sl2lab::testing::random_sl2r;
using sl2lab::testing::random_upsilon;
using sl2lab::testing::uniform;

namespace {

// Explicit entrywise product, independent of Eigen's expression templates.
Mat2C explicit_product(const Mat2C& a, const Mat2C& b) {
  Mat2C r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

Complex act(const Mat2C& m, Complex z) { return mobius_apply(m, Extended<double>{z, false}).value; }

// Lift of arg(tau)/2pi for a path of matrices s -> m(s) in Upsilon starting at the identity.
template <typename Path>
double continued_lift(const Path& m, Complex z, int steps = 2000) {
  double lift = 0.0;
  Complex prev(1.0);
  for (int i = 1; i <= steps; ++i) {
    const Complex t = tau(m(static_cast<double>(i) / steps), z);
    lift += phase_step(prev, t);
    prev = t;
  }
  return lift;
}

Mat2R expm_sl2(const Mat2R& x) {
  // 2x2 traceless: exp(X) = cosh(r) I + sinh(r)/r X with r^2 = -det X.
  const double d = -x.determinant();
  double c, s;
  if (d > 0) {
    const double r = std::sqrt(d);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  } else if (d < 0) {
    const double r = std::sqrt(-d);
    c = std::cos(r);
    s = std::sin(r) / r;
  } else {
    c = 1.0;
    s = 1.0;
  }
  return c * Mat2R::Identity() + s * x;
}

}  // namespace

TEST_CASE("disk_coords fixes the identity and diagonalizes rotations") {
  CHECK((disk_coords(Mat2R::Identity()) - Mat2C::Identity()).norm() < 1e-15);
  for (double theta : {0.0, 0.1, 0.25, 0.37, -0.8}) {
    const Mat2C q = q_matrix<double>();
    const Mat2C qi = q_inverse<double>();
    const Mat2C oracle = explicit_product(explicit_product(q, rotation(theta).cast<Complex>()), qi);
    Mat2C expected = Mat2C::Zero();
    expected(0, 0) = std::exp(Complex(0.0, -kTwoPi * theta));
    expected(1, 1) = std::exp(Complex(0.0, kTwoPi * theta));
    CHECK((oracle - expected).norm() < 1e-14);
    CHECK((disk_coords(rotation(theta)) - expected).norm() < 1e-14);
  }
}

TEST_CASE("Q has unit determinant and the stated inverse") {
  const Mat2C q = q_matrix<double>();
  CHECK(std::abs(q.determinant() - Complex(1.0)) < 1e-15);
  CHECK((q * q_inverse<double>() - Mat2C::Identity()).norm() < 1e-15);
}

TEST_CASE("disk_coords lands in SU(1,1) and is a homomorphism") {
  for (int i = 0; i < 1000; ++i) {
    const Mat2R a = random_sl2r();
    const Mat2R b = random_sl2r();
    const Mat2C m = disk_coords(a);
    CHECK(std::abs(std::norm(m(0, 0)) - std::norm(m(1, 0)) - 1.0) < 1e-10);
    CHECK(std::abs(m(0, 1) - std::conj(m(1, 0))) < 1e-12);
    CHECK(std::abs(m(1, 1) - std::conj(m(0, 0))) < 1e-12);
    CHECK((disk_coords(Mat2R(a * b)) - m * disk_coords(b)).norm() < 1e-12 * (1.0 + m.norm() * m.norm()));
    CHECK((from_disk_coords(m) - a.cast<Complex>()).norm() < 1e-12 * (1.0 + a.norm()));
  }
}

TEST_CASE("disk action matches the vector-angle picture") {
  // (x, y) ~ (x - iy)/(x + iy): the line at angle phi sits at e^{-4 pi i phi}.
  for (int i = 0; i < 200; ++i) {
    const Mat2R a = random_sl2r();
    const double phi = uniform(0.0, 0.5);
    const Eigen::Vector2d y(std::cos(kTwoPi * phi), std::sin(kTwoPi * phi));
    const Eigen::Vector2d ay = a * y;
    const Complex z(std::polar(1.0, -2.0 * kTwoPi * phi));
    const Complex w = (Complex(ay[0], -ay[1])) / (Complex(ay[0], ay[1]));
    CHECK(std::abs(act(disk_coords(a), z) - w) < 1e-10);
    // arg tau is the vector-angle increment, |tau| the stretch.
    const Complex t = tau(disk_coords(a), z);
    CHECK(std::abs(std::abs(t) - ay.norm()) < 1e-10);
    const double dphi = phase_step(Complex(y[0], y[1]), Complex(ay[0], ay[1]));
    CHECK(std::abs(std::remainder(std::arg(t) / kTwoPi - dphi, 1.0)) < 1e-10);
  }
}

TEST_CASE("mobius_apply conventions") {
  const Complex z(0.3, 0.1);
  CHECK(std::abs(act(Mat2C::Identity(), z) - z) < 1e-16);
  for (double theta : {0.05, 0.3, 0.71}) {
    CHECK(std::abs(act(disk_coords(rotation(theta)), z) - std::exp(Complex(0.0, -2.0 * kTwoPi * theta)) * z) < 1e-14);
  }
  Mat2C pole;
  pole << 1.0, 2.0, 1.0, 0.0;
  CHECK(mobius_apply(pole, Extended<double>{0.0, false}).infinite);
  const auto at_inf = mobius_apply(pole, Extended<double>::infinity());
  CHECK_FALSE(at_inf.infinite);
  CHECK(std::abs(at_inf.value - Complex(1.0)) < 1e-16);
}

TEST_CASE("mobius_image_disk closed forms and boundary-sampling oracle") {
  const auto id = mobius_image_disk(Mat2C(Mat2C::Identity()));
  CHECK(std::abs(id.center) < 1e-16);
  CHECK(std::abs(id.radius - 1.0) < 1e-16);

  const double t = -0.05;
  Mat2C d = Mat2C::Zero();
  d(0, 0) = std::exp(kTwoPi * t);
  d(1, 1) = std::exp(-kTwoPi * t);
  const auto img = mobius_image_disk(d);
  CHECK(std::abs(img.center) < 1e-16);
  CHECK(std::abs(img.radius - std::exp(4.0 * std::numbers::pi * t)) < 1e-15);

  int tested = 0;
  while (tested < 1000) {
    Mat2C m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = Complex(uniform(-2, 2), uniform(-2, 2));
    if (std::abs(m(1, 1)) < std::abs(m(1, 0)) + 0.05 || std::abs(m.determinant()) < 0.05) continue;
    ++tested;
    const auto disk = mobius_image_disk(m);
    double min_r = 1e300, max_r = 0.0;
    for (int k = 0; k < 720; ++k) {
      const Complex w = act(m, std::polar(1.0, kTwoPi * k / 720.0));
      const double r = std::abs(w - disk.center);
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
    }
    const double scale = 1.0 + disk.radius + std::abs(disk.center);
    CHECK(std::abs(min_r - disk.radius) < 1e-8 * scale);
    CHECK(std::abs(max_r - disk.radius) < 1e-8 * scale);
    CHECK(std::abs(act(m, Complex(0.0)) - disk.center) < disk.radius);
  }

  Mat2C bad;
  bad << 1.0, 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(mobius_image_disk(bad), Error);
  try {
    mobius_image_disk(bad);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::PoleOnCircle);
  }
}

TEST_CASE("tau closed forms and half-plane property") {
  CHECK(std::abs(tau(Mat2C(Mat2C::Identity()), Complex(0.4, -0.2)) - Complex(1.0)) < 1e-16);
  for (double theta : {0.1, 0.45, 0.9}) {
    const Mat2C r = disk_coords(rotation(theta));
    for (Complex z : {Complex(0.0), Complex(0.5, 0.5), Complex(-0.9, 0.0)})
      CHECK(std::abs(tau(r, z) - std::exp(Complex(0.0, kTwoPi * theta))) < 1e-14);
  }
  for (int i = 0; i < 300; ++i) {
    const Mat2C a = random_upsilon();
    const Complex ref = tau(a, Complex(0.0));
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double s = phase_step(ref, tau(a, std::polar(1.0, kTwoPi * k / 100.0)));
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    CHECK(hi - lo < 0.5);
  }
  Mat2C zero = Mat2C::Zero();
  zero(0, 0) = 1.0;
  CHECK_THROWS_AS(tau(zero, Complex(0.0)), Error);
}

TEST_CASE("lifted tau composes along continuous paths") {
  for (int i = 0; i < 20; ++i) {
    Mat2R x1, x2;
    x1 << uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), 0.0;
    x1(1, 1) = -x1(0, 0);
    x2 << uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), 0.0;
    x2(1, 1) = -x2(0, 0);
    const double c1 = uniform(0.05, 0.4), c2 = uniform(0.05, 0.4);
    auto path = [](const Mat2R& x, double c) {
      return [x, c](double s) {
        Mat2C k = Mat2C::Zero();
        k(0, 0) = std::exp(Complex(-s * c));
        k(1, 1) = std::exp(Complex(s * c));
        return Mat2C(k * disk_coords(expm_sl2(s * x)));
      };
    };
    const auto p1 = path(x1, c1);
    const auto p2 = path(x2, c2);
    const Complex z = random_disk_point(1.0);
    const double lhs = continued_lift([&](double s) { return Mat2C(p2(s) * p1(s)); }, z);
    // tau(A2 A1, z) = tau(A2, A1 z) tau(A1, z), lifted along the same parameter.
    double rhs = 0.0;
    {
      const int steps = 2000;
      Complex prev2(1.0), prev1(1.0);
      for (int k = 1; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        const Complex t1 = tau(p1(s), z);
        const Complex t2 = tau(p2(s), mobius(p1(s), z));
        rhs += phase_step(prev2, t2) + phase_step(prev1, t1);
        prev2 = t2;
        prev1 = t1;
      }
    }
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("phase_unwrap") {
  const std::vector<Complex> ones(3, Complex(1.0));
  const auto a = phase_unwrap(ones);
  for (double v : a.values) CHECK(v == 0.0);

  std::vector<Complex> seq;
  for (int k = 0; k < 10; ++k) seq.push_back(std::polar(1.0, kTwoPi * 0.3 * k));
  const auto b = phase_unwrap(seq);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(b.values[static_cast<std::size_t>(k)] - 0.3 * k) < 1e-12);

  std::vector<Complex> fast;
  for (int k = 0; k < 10; ++k) fast.push_back(std::polar(1.0, kTwoPi * 0.49 * k));
  CHECK_THROWS_AS(phase_unwrap(fast), Error);
  try {
    phase_unwrap(fast);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnwrapStep);
  }
  // Refined sampling of the same phase succeeds.
  std::vector<Complex> refined;
  for (int k = 0; k < 40; ++k) refined.push_back(std::polar(1.0, kTwoPi * 0.49 * k / 4.0));
  CHECK(std::abs(phase_unwrap(refined).total() - 0.49 * 39 / 4.0) < 1e-12);

  const auto first = phase_unwrap(std::vector<Complex>{std::polar(1.0, -0.5)});
  CHECK(first.values[0] >= 0.0);
  CHECK(first.values[0] < 1.0);
}

TEST_CASE("hyperbolic distance") {
  CHECK(hyperbolic_distance(Complex(0.0), Complex(0.0)) == 0.0);
  // Simpson quadrature of the metric density 1/(1-r^2) along [0, 1/2].
  const int n = 2000;
  double integral = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double r = 0.5 * k / n;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w / (1.0 - r * r);
  }
  integral *= 0.5 / n / 3.0;
  CHECK(std::abs(hyperbolic_distance(Complex(0.0), Complex(0.5)) - integral) < 1e-12);
  CHECK(std::abs(integral - 0.5493061443340549) < 1e-12);

  for (int i = 0; i < 1000; ++i) {
    const Mat2C m = disk_coords(random_sl2r(1.0));
    const Complex z = random_disk_point(0.9), w = random_disk_point(0.9);
    const Complex mz = mobius(m, z), mw = mobius(m, w);
    if (std::abs(mz) > 0.999 || std::abs(mw) > 0.999) continue;
    CHECK(std::abs(hyperbolic_distance(mz, mw) - hyperbolic_distance(z, w)) < 1e-10);
  }
  CHECK_THROWS_AS(hyperbolic_distance(Complex(1.0), Complex(0.0)), Error);
}

TEST_CASE("determinant repair keeps the branch continuous") {
  Mat2C m = 1.3 * disk_coords(random_sl2r());
  const Complex f = repair_determinant(m, Complex(1.0));
  CHECK(std::abs(m.determinant() - Complex(1.0)) < 1e-12);
  CHECK(std::abs(f - Complex(1.0 / 1.3)) < 1e-12);
}

TEST_CASE("polar decomposition and symmetric log") {
  for (int i = 0; i < 200; ++i) {
    const Mat2R a = random_sl2r();
    const Polar p = polar_decompose(a);
    CHECK((rotation(p.angle) * p.positive - a).norm() < 1e-12 * a.norm());
    CHECK(std::abs(p.positive(0, 1) - p.positive(1, 0)) < 1e-14);
    CHECK((symmetric_exp(symmetric_log(p.positive)) - p.positive).norm() < 1e-11 * p.positive.norm());
  }
  CHECK(spectral_norm(Mat2R(Mat2R::Identity() * 3.0)) == doctest::Approx(3.0));
}
