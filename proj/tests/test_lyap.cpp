#include <doctest.h>

#include "sl2lab/io.hpp"
#include "sl2lab/lyap.hpp"
#include "test_util.hpp"

using namespace sl2lab;
using sl2lab::testing::uniform;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

Mat2R diag(double l) {
  Mat2R d = Mat2R::Zero();
  d(0, 0) = l;
  d(1, 1) = 1.0 / l;
  return d;
}

const double kLn54 = std::log(1.25);

}  // namespace

TEST_CASE("orbit estimator closed forms") {
  for (double l : {1.5, 3.0, 10.0}) {
    const Cocycle c(v1(kGoldenMean), CocycleExpr::constant(diag(l), 1));
    CHECK(std::abs(lyapunov_orbit(c, v1(0.1), 100).value - std::log(l)) < 1e-10);
  }
  for (int l : {1, -2, 5}) {
    const Cocycle c(v1(kGoldenMean), rotation_model({l}));
    CHECK(std::abs(lyapunov_orbit(c, v1(0.3), 1000).value) < 1e-10);
  }
  const Cocycle c2(Eigen::Vector2d(kGoldenMean, kSilverMean), rotation_model({1, 3}));
  CHECK(std::abs(lyapunov_orbit(c2, Eigen::Vector2d(0.1, 0.2), 1000).value) < 1e-10);
}

TEST_CASE("Herman bound on a long orbit") {
  const Cocycle c(v1(kGoldenMean), herman(2.0, {1}));
  const LyapEstimate e = lyapunov_orbit(c, v1(0.0), 1000000);
  CHECK(e.value >= kLn54 - 3e-3);
  CHECK(e.value >= -e.error_proxy);
}

TEST_CASE("finite-n upper bound") {
  const Cocycle k(v1(kGoldenMean), CocycleExpr::constant(diag(2.5), 1));
  CHECK(std::abs(lyapunov_upper(k, 1, TorusGrid::uniform(1, 8)) - std::log(2.5)) < 1e-14);
  const Cocycle r(v1(kGoldenMean), rotation_model({2}));
  for (long n : {1L, 3L, 17L}) CHECK(std::abs(lyapunov_upper(r, n, TorusGrid::uniform(1, 32))) < 1e-12);

  const Cocycle h(v1(kGoldenMean), herman(2.0, {1}));
  const double orbit = lyapunov_orbit(h, v1(0.0), 100000).value;
  const TorusGrid grid = TorusGrid::uniform(1, 256);
  double prev = lyapunov_upper(h, 2, grid);
  for (long n = 4; n <= 256; n *= 2) {
    const double u = lyapunov_upper(h, n, grid);
    CHECK(u <= prev + 1e-3);
    CHECK(u >= orbit - 1e-3);
    prev = u;
  }
}

TEST_CASE("average of ln((|A| + 1/|A|)/2)") {
  const TorusGrid g = TorusGrid::uniform(1, 64);
  CHECK(herman_average_rhs(rotation_model({3}), g) == 0.0);
  CHECK(std::abs(herman_average_rhs(herman(2.0, {1}), g) - 0.2231435513142098) < 1e-14);
  CHECK(std::abs(herman_average_rhs(CocycleExpr::constant(diag(3.0), 1), g) - std::log(5.0 / 3.0)) < 1e-14);
  // Closed form for SL(2,R): (|A| + 1/|A|)/2 = sqrt(|A|_F^2 + 2)/2.
  const CocycleExpr s = schrodinger(TrigPoly::cosine({1}, 1.7), 0.4);
  double ref = 0.0;
  for (const auto& x : g.points) ref += std::log(0.5 * std::sqrt(s.eval_real(x).squaredNorm() + 2.0));
  CHECK(std::abs(herman_average_rhs(s, g) - ref / 64.0) < 1e-12);
}

TEST_CASE("theta average of the twisted family") {
  const Cocycle rot(v1(kGoldenMean), rotation_model({1}));
  CHECK(std::abs(lyapunov_theta_average(rot, 16, 2000, v1(0.0))) < 1e-8);
  const Cocycle id(v1(kGoldenMean), CocycleExpr::constant(Mat2R::Identity(), 1));
  CHECK(std::abs(lyapunov_theta_average(id, 16, 2000, v1(0.0))) < 1e-10);
  const Cocycle h(v1(kGoldenMean), herman(2.0, {1}));
  const double avg = lyapunov_theta_average(h, 64, 100000, v1(0.0));
  CHECK(std::abs(avg - kLn54) <= 0.01 * kLn54);
}

TEST_CASE("conjugacy and iterate invariance") {
  const Cocycle h(v1(kGoldenMean), CocycleExpr::product({herman(2.0, {1}), CocycleExpr::shear_upper(TrigPoly::cosine({1}, 0.4))}));
  const double base = lyapunov_orbit(h, v1(0.0), 100000).value;
  for (int i = 0; i < 4; ++i) {
    const CocycleExpr b = CocycleExpr::product({CocycleExpr::diag_exp(TrigPoly::cosine({1}, uniform(-0.5, 0.5), uniform(0, 1))),
                                                CocycleExpr::shear_lower(TrigPoly::sine({2}, uniform(-0.5, 0.5)))});
    const LyapEstimate e = lyapunov_orbit(h.conjugated(b), v1(0.0), 100000);
    CHECK(std::abs(e.value - base) <= 2e-2);
    CHECK(e.value >= -e.error_proxy);
  }
  const LyapEstimate e3 = lyapunov_orbit(h.iterated(3), v1(0.0), 40000);
  CHECK(std::abs(e3.value - 3.0 * base) <= 2e-2 + e3.error_proxy);
}
