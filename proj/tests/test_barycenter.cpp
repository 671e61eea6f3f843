#include <doctest.h>

#include "sl2lab/barycenter.hpp"
#include "test_util.hpp"

using namespace sl2lab;
using sl2lab::testing::random_disk_point;
using sl2lab::testing::uniform;

namespace {

/// Random SU(1,1) map: rotation followed by the automorphism sending w to 0.
Mat2C random_su11(double rmax = 0.8) {
  Mat2C r = Mat2C::Zero();
  const Complex e = std::polar(1.0, kTwoPi * uniform(0.0, 1.0));
  r(0, 0) = e;
  r(1, 1) = std::conj(e);
  return r * disk_automorphism_to_origin(random_disk_point(rmax));
}

DiskMeasure random_measure(int atoms, double rmax = 0.8) {
  std::vector<DiskAtom> a;
  for (int i = 0; i < atoms; ++i) a.push_back({random_disk_point(rmax), uniform(0.1, 1.0)});
  return DiskMeasure::normalized(a);
}

/// Midpoint oracle: bisection on s in [0, 1] along the Euclidean chord after
/// moving z to 0 (geodesics through 0 are diameters), equalizing distances.
Complex midpoint_by_bisection(Complex z, Complex w) {
  const Mat2C to0 = disk_automorphism_to_origin(z);
  const Complex u = mobius(to0, w);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double s = 0.5 * (lo + hi);
    const Complex p = s * u;
    (hyperbolic_distance(Complex(0.0), p) < hyperbolic_distance(p, u) ? lo : hi) = s;
  }
  return mobius(inverse_unimodular(to0), 0.5 * (lo + hi) * u);
}

}  // namespace

TEST_CASE("midpoint closed forms and bisection oracle") {
  CHECK(std::abs(hyperbolic_midpoint(Complex(0.3, -0.2), Complex(0.3, -0.2)) - Complex(0.3, -0.2)) == 0.0);
  CHECK(std::abs(hyperbolic_midpoint(Complex(0.0), Complex(0.8)) - 0.5) < 1e-15);
  CHECK(std::abs(midpoint_by_bisection(Complex(0.0), Complex(0.8)) - 0.5) < 1e-12);
  for (int i = 0; i < 200; ++i) {
    const Complex z = random_disk_point(), w = random_disk_point();
    CHECK(std::abs(hyperbolic_midpoint(z, w) - midpoint_by_bisection(z, w)) < 1e-9);
  }
  CHECK_THROWS_AS(hyperbolic_midpoint(Complex(1.0), Complex(0.0)), Error);
}

TEST_CASE("midpoint equivariance") {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat2C m = random_su11();
    const Complex z = random_disk_point(0.8), w = random_disk_point(0.8);
    worst = std::max(worst, std::abs(mobius(m, hyperbolic_midpoint(z, w)) -
                                     hyperbolic_midpoint(mobius(m, z), mobius(m, w))));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("geodesic points") {
  const Complex z(0.2, 0.1), w(-0.5, 0.4);
  CHECK(std::abs(geodesic_point(z, w, 0.5) - hyperbolic_midpoint(z, w)) < 1e-14);
  const double d = hyperbolic_distance(z, w);
  for (double s : {0.1, 0.3, 0.9})
    CHECK(std::abs(hyperbolic_distance(z, geodesic_point(z, w, s)) - s * d) < 1e-12);
}

TEST_CASE("phi values") {
  CHECK(phi(DiskMeasure::normalized({{Complex(0.0), 1.0}})) == 1.0);
  CHECK(std::abs(phi(DiskMeasure::normalized({{Complex(0.6), 0.5}, {Complex(-0.6), 0.5}})) - 1.5625) < 1e-14);
  for (int i = 0; i < 20; ++i) CHECK(phi(random_measure(4)) >= 1.0);
  CHECK_THROWS_AS(phi(DiskMeasure{{{Complex(1.0), 1.0}}}), Error);
  CHECK_THROWS_AS(DiskMeasure::normalized({{Complex(0.1), -1.0}, {Complex(0.2), 2.0}}), Error);
}

TEST_CASE("pairing") {
  const Complex z(0.3, 0.4), w(-0.1, 0.6);
  const DiskMeasure dz = DiskMeasure::normalized({{z, 1.0}}), dw = DiskMeasure::normalized({{w, 1.0}});
  const DiskMeasure p = pair_measures(dz, dw);
  REQUIRE(p.atoms.size() == 1);
  CHECK(std::abs(p.atoms[0].z - hyperbolic_midpoint(z, w)) < 1e-15);

  for (int i = 0; i < 50; ++i) {
    const DiskMeasure mu = random_measure(3), nu = random_measure(4);
    std::vector<DiskAtom> half;
    for (const auto& a : mu.atoms) half.push_back({a.z, 0.5 * a.weight});
    for (const auto& a : nu.atoms) half.push_back({a.z, 0.5 * a.weight});
    const DiskMeasure pn = pair_measures(mu, nu);
    CHECK(pn.atoms.size() == 12);
    CHECK(std::abs(pn.total_weight() - 1.0) < 1e-12);
    CHECK(phi(DiskMeasure{half}) >= phi(pn));
  }

  const DiskMeasure sym = DiskMeasure::normalized({{Complex(0.5, 0.2), 1.0}, {Complex(-0.5, -0.2), 1.0}});
  const DiskMeasure ss = pair_measures(sym, sym);
  double at0 = 0.0;
  for (const auto& a : ss.atoms)
    if (std::abs(a.z) < 1e-15) at0 += a.weight;
  CHECK(std::abs(at0 - 0.5) < 1e-15);
}

TEST_CASE("barycenter of simple measures") {
  const Complex z(0.4, -0.7);
  const BarycenterResult d = conformal_barycenter(DiskMeasure::normalized({{z, 1.0}}));
  CHECK(d.iterations == 0);
  CHECK(d.point == z);
  const BarycenterResult s = conformal_barycenter(DiskMeasure::normalized({{z, 1.0}, {-z, 1.0}}));
  CHECK(std::abs(s.point) < 1e-8);
  // k-fold symmetric measures: the symmetry fixes the barycenter at 0, and the
  // order-free compaction keeps the symmetry.
  for (int k : {3, 4, 5, 7})
    for (double r : {0.3, 0.8}) {
      std::vector<DiskAtom> a;
      for (int j = 0; j < k; ++j) a.push_back({std::polar(r, kTwoPi * j / k + 0.1), 1.0});
      CHECK(std::abs(conformal_barycenter(DiskMeasure::normalized(a)).point) < 1e-8);
    }
  const BarycenterResult central = conformal_barycenter(DiskMeasure::normalized(
      {{Complex(0.3, 0.2), 0.7}, {Complex(-0.3, -0.2), 0.7}, {Complex(0.1, -0.6), 0.3}, {Complex(-0.1, 0.6), 0.3}}));
  CHECK(std::abs(central.point) < 1e-8);
}

TEST_CASE("Douady-Earle frame center") {
  for (int i = 0; i < 50; ++i) {
    const DiskMeasure mu = random_measure(5, 0.9);
    const Complex c = douady_earle_center(mu);
    Complex f(0.0);
    for (const auto& a : mu.atoms) f += a.weight * (a.z - c) / (1.0 - std::conj(c) * a.z);
    CHECK(std::abs(f) < 1e-14);
    const Mat2C m = random_su11();
    CHECK(std::abs(douady_earle_center(mu.pushed(m)) - mobius(m, c)) < 1e-12);
  }
}

TEST_CASE("compaction accuracy against a larger working cap") {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const DiskMeasure mu = random_measure(5);
    BarycenterOptions big;
    big.cap = 1024;
    worst = std::max(worst, std::abs(conformal_barycenter(mu).point - conformal_barycenter(mu, big).point));
  }
  MESSAGE("cap 256 vs 1024 barycenter difference " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("barycenter equivariance, phi decrease, determinism") {
  const double tol = 1e-8;
  double worst = 0.0;
  // The acceptance suite runs 100 maps; 25 keep the unit run short.
  for (int i = 0; i < 25; ++i) {
    const DiskMeasure mu = random_measure(5);
    const Mat2C m = random_su11();
    BarycenterOptions opt;
    opt.tol = tol;
    const BarycenterResult b = conformal_barycenter(mu, opt);
    const BarycenterResult bm = conformal_barycenter(mu.pushed(m), opt);
    worst = std::max(worst, std::abs(bm.point - mobius(m, b.point)));
    CHECK(b.phi_monotone);
    for (std::size_t k = 1; k < b.phi_trace.size(); ++k) CHECK(b.phi_trace[k] <= b.phi_trace[k - 1] * (1 + 1e-12));
    CHECK(1.0 / (1.0 - std::norm(b.point)) <= phi(mu) + 1e-9);
    if (i < 5) CHECK(conformal_barycenter(mu, opt).point == b.point);
  }
  MESSAGE("worst barycenter equivariance error " << worst);
  CHECK(worst < 10 * tol);
}

TEST_CASE("barycenter errors") {
  const DiskMeasure mu = random_measure(5);
  BarycenterOptions few;
  few.max_iterations = 2;
  CHECK_THROWS_AS(conformal_barycenter(mu, few), Error);
  BarycenterOptions exact;
  exact.lossy = false;
  try {
    conformal_barycenter(mu, exact);
    FAIL("expected AtomBlowup");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AtomBlowup);
  }
}

TEST_CASE("barycenters of weakly converging approximations converge") {
  // Midpoint-rule discretizations of a density on a chord; weak error O(1/n^2).
  auto approx = [](int n) {
    std::vector<DiskAtom> a;
    for (int k = 0; k < n; ++k) {
      const double u = (k + 0.5) / n;
      a.push_back({Complex(0.1, 0.2) + std::polar(1.2 * (u - 0.5), 0.7), 1.0 + u});
    }
    return DiskMeasure::normalized(a);
  };
  const Complex b4 = conformal_barycenter(approx(4)).point;
  const Complex b8 = conformal_barycenter(approx(8)).point;
  const Complex b16 = conformal_barycenter(approx(16)).point;
  MESSAGE("successive differences " << std::abs(b8 - b4) << " " << std::abs(b16 - b8));
  CHECK(std::abs(b16 - b8) < 0.5 * std::abs(b8 - b4));
}
