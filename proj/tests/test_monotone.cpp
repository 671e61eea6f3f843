#include <doctest.h>

#include "sl2lab/io.hpp"
#include "sl2lab/monotone.hpp"
#include "test_util.hpp"

using namespace sl2lab;
using sl2lab::testing::uniform;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

/// Finite-difference speed of the vector angle, brute force over directions.
double brute_min_speed(const Family& f, const Eigen::VectorXd& x, double theta, int dirs) {
  const double h = 1e-6;
  double best = 1e300;
  for (int k = 0; k < dirs; ++k) {
    const double phi = M_PI * k / dirs;
    const Eigen::Vector2d y(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d wp = f.eval_real(x, theta + h) * y, wm = f.eval_real(x, theta - h) * y;
    double d = std::atan2(wp[1], wp[0]) - std::atan2(wm[1], wm[0]);
    d -= kTwoPi * std::round(d / kTwoPi);
    best = std::min(best, d / (2.0 * h));
  }
  return best;
}

}  // namespace

TEST_CASE("exact direction minimum agrees with a direction scan") {
  for (int trial = 0; trial < 200; ++trial) {
    const Mat2R a = sl2lab::testing::random_sl2r(), da = sl2lab::testing::random_sl2r() * uniform(-2.0, 2.0);
    const SpeedRange r = angular_speed_range(a, da);
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 4096; ++k) {
      const double phi = M_PI * k / 4096;
      const double s = angular_speed(a, da, Eigen::Vector2d(std::cos(phi), std::sin(phi)));
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    CHECK(r.min <= lo + 1e-9);
    CHECK(r.max >= hi - 1e-9);
    CHECK(lo - r.min < 1e-3 * (1.0 + std::abs(r.min)));
    CHECK(angular_speed(a, da, Eigen::Vector2d(std::cos(r.argmin_angle), std::sin(r.argmin_angle))) ==
          doctest::Approx(r.min).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("RotTwist speed is exactly 2 pi") {
  const TorusGrid g = TorusGrid::uniform(1, 64);
  const std::vector<double> thetas = uniform_nodes(16);
  for (const CocycleExpr& e : {herman(3.0, {1}), schrodinger(TrigPoly::cosine({1}, 2.0), 0.4), rotation_model({2})}) {
    const MonotonicityReport r = monotonicity_constant(Family::rot_twist(Cocycle(v1(kGoldenMean), e)), g, thetas);
    CHECK(std::abs(r.epsilon - kTwoPi) < 1e-12);
    CHECK(std::abs(r.max_speed - kTwoPi) < 1e-12);
    CHECK(r.certified());
  }
}

TEST_CASE("PhaseShift on rotation models") {
  const Eigen::Vector2d alpha(kGoldenMean, kSilverMean);
  const TorusGrid g = TorusGrid::uniform(2, 8);
  for (const auto& [l, w] : std::vector<std::pair<std::vector<int>, Eigen::Vector2d>>{
           {{1, 0}, Eigen::Vector2d(1.0, 0.0)}, {{2, -1}, Eigen::Vector2d(1.0, 0.5)}, {{1, 3}, Eigen::Vector2d(0.0, -1.0)}}) {
    const Family f = Family::phase_shift(Cocycle(alpha, rotation_model(l)), w);
    const MonotonicityReport r = monotonicity_constant(f, g, {0.0, 0.3});
    CHECK(std::abs(r.epsilon - kTwoPi * (l[0] * w[0] + l[1] * w[1])) < 1e-10);
    CHECK(r.certified());
  }
}

TEST_CASE("Herman phase family is monotone with speed 2 pi / lambda^2") {
  const TorusGrid g = TorusGrid::uniform(1, 256);
  for (double lambda : {1.5, 4.0, 20.0}) {
    const Family f = Family::phase_shift(Cocycle(v1(kGoldenMean), herman(lambda, {1})), v1(1.0));
    const MonotonicityReport r = monotonicity_constant(f, g, {0.0, 0.25});
    CHECK(r.status != MonotoneStatus::NotMonotonic);
    CHECK(r.epsilon == doctest::Approx(kTwoPi / (lambda * lambda)).epsilon(1e-10));
    CHECK(r.max_speed == doctest::Approx(kTwoPi * lambda * lambda).epsilon(1e-10));
    // Independent finite-difference scan.
    double brute = 1e300;
    for (int i = 0; i < 32; ++i) brute = std::min(brute, brute_min_speed(f, v1(i / 32.0), 0.1, 256));
    CHECK(brute >= r.epsilon * (1.0 - 1e-4));
  }
}

TEST_CASE("certified epsilon bounds off-grid probes") {
  const Family f = Family::phase_shift(Cocycle(v1(kGoldenMean), herman(1.5, {1})).conjugated(
                                           CocycleExpr::diag_exp(TrigPoly::cosine({1}, 0.1))),
                                       v1(1.0));
  const MonotonicityReport r = monotonicity_constant(f, TorusGrid::uniform(1, 128), uniform_nodes(32));
  REQUIRE(r.certified());
  for (int i = 0; i < 500; ++i) {
    const auto [a, da] = f.theta_jet(v1(uniform(0.0, 1.0)), uniform(0.0, 1.0));
    CHECK(angular_speed_range(a, da).min >= r.epsilon - r.lipschitz_margin);
  }
}

TEST_CASE("translation invariance of PhaseShift epsilon") {
  const Family f = Family::phase_shift(Cocycle(v1(kGoldenMean), herman(2.5, {1})), v1(1.0));
  const TorusGrid g = TorusGrid::uniform(1, 128);
  const double all = monotonicity_constant(f, g, uniform_nodes(16)).epsilon;
  const double at0 = monotonicity_constant(f, g, {0.0}).epsilon;
  CHECK(std::abs(all - at0) < 1e-12);
}

TEST_CASE("Schroedinger families") {
  const TrigPoly v = TrigPoly::cosine({1}, 2.0);
  const Family phase = Family::phase_shift(Cocycle(v1(kGoldenMean), schrodinger(v, 0.3)), v1(1.0));
  const MonotonicityReport r = monotonicity_constant(phase, TorusGrid::uniform(1, 64), {0.0});
  CHECK(r.status == MonotoneStatus::NotMonotonic);
  CHECK(r.argmin.speed < 0.0);
  CHECK(r.opposite.speed > 0.0);
  const auto [a, da] = phase.theta_jet(r.argmin.x, r.argmin.theta);
  CHECK(angular_speed(a, da, Eigen::Vector2d(std::cos(r.argmin.y_angle), std::sin(r.argmin.y_angle))) < 0.0);

  // First iterate in E has a zero direction; the second iterate is strictly monotone.
  const Family energy = schrodinger_energy_family(TrigPoly::constant(1, 0.0), v1(kGoldenMean));
  std::vector<double> window;
  for (int i = 0; i <= 40; ++i) window.push_back(-1.0 + i / 20.0);
  const MonotonicityReport first = monotonicity_constant(energy, TorusGrid::uniform(1, 8), window);
  CHECK(first.status == MonotoneStatus::Uncertified);
  CHECK(std::abs(first.epsilon) < 1e-12);
  const MonotonicityReport second = monotonicity_constant(energy.iterated(2), TorusGrid::uniform(1, 8), window);
  CHECK(second.certified());
  CHECK(second.epsilon < 0.0);
}

TEST_CASE("w cones") {
  const Eigen::Vector2d alpha(kGoldenMean, kSilverMean);
  const TorusGrid g = TorusGrid::uniform(2, 8);
  const ConeReport rm = w_cone_sample(Cocycle(alpha, rotation_model({1, 0})),
                                      {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 1)}, g);
  CHECK(rm.samples[0].report.certified());
  CHECK(rm.samples[0].report.epsilon > 0.0);
  CHECK(rm.samples[1].report.certified());
  CHECK(rm.samples[1].report.epsilon < 0.0);
  CHECK(rm.samples[2].report.status == MonotoneStatus::Uncertified);
  CHECK(std::abs(rm.samples[2].report.epsilon) < 1e-12);
  CHECK(rm.convexity_ok);

  const ConeReport own = w_cone_sample(Cocycle(alpha, rotation_model({2, 1})), {Eigen::Vector2d(2, 1)}, g);
  CHECK(own.samples[0].report.certified());

  // Homotopic to a constant: never monotone in any phase direction.
  const TrigPoly v = TrigPoly::cosine({1, 0}, 1.0) + TrigPoly::cosine({0, 1}, 0.7);
  const ConeReport sch = w_cone_sample(Cocycle(alpha, schrodinger(v, 0.2)),
                                       {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)}, g);
  for (const auto& s : sch.samples)
    CHECK((s.report.status == MonotoneStatus::NotMonotonic || std::abs(s.report.epsilon) < 1e-12));
}
