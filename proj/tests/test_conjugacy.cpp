#include <doctest.h>

#include "sl2lab/conjugacy.hpp"
#include "sl2lab/io.hpp"
#include "test_util.hpp"

using namespace sl2lab;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

/// Root in the disk of c w^2 + (d - a) w - b = 0 for the disk form [[a, b], [c, d]].
Complex disk_fixed_point(const Mat2C& m) {
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const Complex s = std::sqrt((d - a) * (d - a) + 4.0 * b * c);
  const Complex w1 = (a - d + s) / (2.0 * c), w2 = (a - d - s) / (2.0 * c);
  return std::abs(w1) < 1.0 ? w1 : w2;
}

}  // namespace

TEST_CASE("section conjugacy sends the section value to the origin") {
  CHECK((section_conjugacy(0.0) - Mat2R::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  for (int i = 0; i < 200; ++i) {
    const Complex m = std::polar(testing::uniform(0.0, 0.95), testing::uniform(0.0, kTwoPi));
    const Mat2R b = section_conjugacy(m);
    CHECK(std::abs(b.determinant() - 1.0) < 1e-12);
    CHECK(std::abs(mobius(disk_coords(b), m)) < 1e-12);
    // singular values of (1 - r^2)^{-1/2} [[1, -m], [-conj m, 1]]: sqrt((1 + r) / (1 - r)) and its inverse
    const double r = std::abs(m);
    CHECK(std::abs(spectral_norm(b) - std::sqrt((1.0 + r) / (1.0 - r))) < 1e-10 * spectral_norm(b));
  }
  CHECK_THROWS_WITH_AS(section_conjugacy(1.0), doctest::Contains("outside"), Error);
}

TEST_CASE("elliptic constant cocycle is conjugated to a rotation") {
  Mat2R a;
  a << 1.2, 0.7, -0.9, 0.3;
  a /= std::sqrt(a.determinant());
  REQUIRE(std::abs(a.trace()) < 2.0);
  const Cocycle c(v1(kGoldenMean), CocycleExpr::constant(a, 1));
  const Complex w = disk_fixed_point(disk_coords(a));
  const TorusGrid g = TorusGrid::uniform(1, 16);
  const L2Conjugacy out = l2_conjugacy_from_section(c, g, std::vector<Complex>(g.size(), w));
  CHECK(out.section_residual < 1e-13);
  CHECK(out.field.quality < 1e-10);
  CHECK(out.verified);
  const Mat2R r = out.field.values[0] * a * inverse_unimodular(out.field.values[0]);
  CHECK((r.transpose() * r - Mat2R::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("smoothly conjugated rotation model recovers a rotation cocycle") {
  const CocycleExpr b0 = CocycleExpr::product(
      {CocycleExpr::shear_upper(TrigPoly::cosine({1}, 0.3)), CocycleExpr::diag_exp(TrigPoly::sine({1}, 0.2))});
  const Cocycle c = Cocycle(v1(kGoldenMean), rotation_model({1})).conjugated(b0);
  const TorusGrid g = TorusGrid::uniform(1, 128);
  std::vector<Complex> m;
  for (const auto& x : g.points) m.push_back(mobius(disk_coords(b0.eval_real(x)), Complex(0.0)));
  const L2Conjugacy out = l2_conjugacy_from_section(c, g, m);
  CHECK(out.section_residual < 1e-12);
  CHECK(out.field.quality < 1e-10);
  CHECK(out.verified);

  // a perturbed section is detected by both numbers, and quality follows the residual
  for (auto& z : m) z *= 1.01;
  const L2Conjugacy bad = l2_conjugacy_from_section(c, g, m);
  CHECK(bad.section_residual > 1e-4);
  CHECK(bad.field.quality > 1e-4);
  CHECK(bad.verified);

  m[3] = 0.999999999999;
  CHECK_THROWS_AS(l2_conjugacy_from_section(c, g, m), Error);
  CHECK_THROWS_AS(l2_conjugacy_from_section(c, TorusGrid::orbit(v1(0.3), v1(0.0), 128), m), Error);
}

TEST_CASE("cohomological equation in closed form") {
  const double alpha = kGoldenMean;
  const TrigPoly phi = TrigPoly::constant(1, 0.2) + TrigPoly::cosine({1}, 0.3) + TrigPoly::sine({2}, 0.1, 0.25);
  const CohomologicalSolution sol = solve_cohomological(phi, v1(alpha));
  CHECK(std::abs(sol.c - 0.2) < 1e-15);
  CHECK(sol.residual < 1e-13);
  for (int i = 0; i < 100; ++i) {
    const double x = testing::uniform(0.0, 1.0);
    const double lhs = phi(v1(x)).real();
    const double rhs = -sol.psi(v1(x + alpha)).real() + sol.psi(v1(x)).real() + sol.c;
    CHECK(std::abs(lhs - rhs) < 1e-13);
    // a cos 2 pi x: psi = Re(a e^{2 pi i x} / (1 - e^{2 pi i alpha}))
    const TrigPoly one = TrigPoly::cosine({1}, 0.3);
    const double oracle = std::real(0.3 * std::polar(1.0, kTwoPi * x) / (1.0 - std::polar(1.0, kTwoPi * alpha)));
    CHECK(std::abs(solve_cohomological(one, v1(alpha)).psi(v1(x)).real() - oracle) < 1e-13);
  }
  const CohomologicalSolution flat = solve_cohomological(TrigPoly::constant(1, 0.7), v1(alpha));
  CHECK(flat.psi.modes().empty());
  CHECK(flat.c == doctest::Approx(0.7));
}

TEST_CASE("cohomological equation reports small divisors") {
  const TrigPoly phi = TrigPoly::cosine({1}, 0.3) + TrigPoly::cosine({2}, 0.1);
  try {
    solve_cohomological(phi, v1(0.5));
    FAIL("expected SmallDivisor");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SmallDivisor);
    std::vector<long> d = e.detail();
    std::sort(d.begin(), d.end());
    CHECK(d == std::vector<long>{-2, 2});
  }
  Eigen::VectorXd a2(2);
  a2 << 0.25, 0.5;
  CHECK_THROWS_AS(solve_cohomological(TrigPoly::cosine({2, -1}, 0.1), a2), Error);
  CHECK_THROWS_AS(solve_cohomological(TrigPoly::linear(v1(1.0)), v1(0.3)), Error);
}

TEST_CASE("lattice search finds the smallest resonance") {
  const LatticeHit h = lattice_search(v1(kGoldenMean), std::fmod(3.0 * kGoldenMean, 1.0), 1e-12);
  CHECK(h.l == std::vector<int>{3});
  Eigen::VectorXd a(2);
  a << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  const double c = 2.0 * a[0] - a[1] + 5.0;
  const LatticeHit h2 = lattice_search(a, c, 1e-12);
  CHECK(h2.l == std::vector<int>{2, -1});
  CHECK(lattice_search(v1(kGoldenMean), 0.0, 0.0).l == std::vector<int>{0});
  try {
    lattice_search(v1(kGoldenMean), 0.5, 1e-15, 10);
    FAIL("expected LatticeSearchFail");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LatticeSearchFail);
  }
}

TEST_CASE("push to model conjugates rotation cocycles toward R_<l,x>") {
  const Cocycle exact(v1(kGoldenMean), CocycleExpr::rot(TrigPoly::linear(v1(1.0)) + TrigPoly::cosine({1}, 0.1)));
  const auto st = push_to_model(exact);
  REQUIRE(st.size() == 4);
  // stage 0: sup_x |R_{x + 0.1 cos 2 pi x} - R_x| = 2 sin(pi * 0.1)
  CHECK(std::abs(st[0].distance - 2.0 * std::sin(0.1 * kTwoPi / 2.0)) < 1e-6);
  for (std::size_t s = 1; s < st.size(); ++s) CHECK(st[s].distance < 1e-13);

  const Cocycle shifted(v1(kGoldenMean), CocycleExpr::product({CocycleExpr::rot(TrigPoly::linear(v1(2.0)) +
                                                                                  TrigPoly::constant(1, 0.3) +
                                                                                  TrigPoly::cosine({1}, 0.1)),
                                                               CocycleExpr::rot(TrigPoly::cosine({2}, 0.05))}));
  PushOptions opt;
  opt.stages = 4;
  const auto st2 = push_to_model(shifted, opt);
  for (std::size_t s = 1; s < st2.size(); ++s) {
    // equal when a stage keeps the previous l and no further modes remain
    CHECK(st2[s].distance <= st2[s - 1].distance + 1e-15);
    // residual rotation angle is at most 2 pi |<l, alpha> - c| plus the dropped modes
    CHECK(st2[s].lattice_error <= std::pow(10.0, -static_cast<double>(s)));
  }
  CHECK(st2[1].distance < st2[0].distance);
  CHECK(st2[2].distance < st2[1].distance);
  CHECK(st2[2].distance <= 2.0 * kTwoPi * 1e-2);

  CHECK_THROWS_AS(push_to_model(Cocycle(v1(kGoldenMean), herman(2.0, {1}))), Error);
}
