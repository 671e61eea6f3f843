#include <doctest.h>

#include <unistd.h>

#include <cstdio>

#include "sl2lab/io.hpp"
#include "test_util.hpp"

using namespace sl2lab;

namespace {

TrigPoly random_poly(int dim, bool linear) {
  TrigPoly p(dim);
  for (int i = 0; i < 4; ++i) {
    Mode k(static_cast<std::size_t>(dim));
    for (auto& kj : k) kj = static_cast<int>(std::lround(testing::uniform(-3.0, 3.0)));
    p.add(k, Complex(testing::uniform(-1.0, 1.0), testing::uniform(-1.0, 1.0)));
  }
  if (linear) {
    Eigen::VectorXd s(dim);
    for (int j = 0; j < dim; ++j) s[j] = std::lround(testing::uniform(-2.0, 2.0));
    p.set_slope(s);
  }
  return p;
}

CocycleExpr random_tree(int dim, int depth) {
  const int pick = static_cast<int>(testing::uniform(0.0, depth > 0 ? 8.0 : 6.0));
  switch (pick) {
    case 0: return CocycleExpr::rot(random_poly(dim, true));
    case 1: return CocycleExpr::diag_exp(random_poly(dim, false));
    case 2: return CocycleExpr::shear_upper(random_poly(dim, false));
    case 3: return CocycleExpr::shear_lower(random_poly(dim, false));
    case 4: return CocycleExpr::constant(testing::random_sl2r(), dim);
    case 5:
      return CocycleExpr::exp_sl2(random_poly(dim, false), random_poly(dim, false), random_poly(dim, false),
                                  testing::uniform(0.0, 1.0));
    case 6: return CocycleExpr::product({random_tree(dim, depth - 1), random_tree(dim, depth - 1)});
    default: {
      Eigen::VectorXd o(dim);
      for (int j = 0; j < dim; ++j) o[j] = testing::uniform(0.0, 1.0);
      return CocycleExpr::shift(o, random_tree(dim, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("cocycle JSON round-trips value-identically") {
  for (int dim : {1, 2, 3})
    for (int i = 0; i < 40; ++i) {
      Eigen::VectorXd alpha(dim);
      for (int j = 0; j < dim; ++j) alpha[j] = testing::uniform(0.0, 1.0);
      const Cocycle c(alpha, random_tree(dim, 3));
      const Json j = to_json(c);
      const Cocycle back = cocycle_from_json(Json::parse(j.dump()));
      CHECK(back == c);
      CHECK(to_json(back).dump() == j.dump());
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(dim, 0.3141);
      CHECK((back.eval_real(x) - c.eval_real(x)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("family JSON round-trips for every kind") {
  const Cocycle base(Eigen::VectorXd::Constant(1, kGoldenMean), herman(2.0, {1}));
  Eigen::VectorXd alpha2(2);
  alpha2 << kGoldenMean, kSilverMean;
  for (const Family& f : {Family::phase_shift(base, Eigen::VectorXd::Constant(1, 0.5)), Family::rot_twist(base),
                          schrodinger_energy_family(TrigPoly::cosine({1}, 2.0), Eigen::VectorXd::Constant(1, kGoldenMean)),
                          Family::general(alpha2, random_tree(3, 2), 1)}) {
    const Family back = family_from_json(Json::parse(to_json(f).dump()));
    CHECK(back == f);
    CHECK(to_json(back) == to_json(f));
  }
}

TEST_CASE("files round-trip through disk") {
  const Cocycle c(Eigen::VectorXd::Constant(1, kSilverMean), random_tree(1, 3));
  char name[] = "/tmp/sl2lab_io_XXXXXX";
  const int fd = mkstemp(name);
  REQUIRE(fd >= 0);
  write_json_file(name, to_json(c));
  CHECK(cocycle_from_json(read_json_file(name)) == c);
  std::remove(name);
  close(fd);
}

TEST_CASE("builder shorthands expand to trees") {
  const Json j = Json::parse(R"({"alpha": "golden", "expr": {"builder": "herman", "lambda": 2, "l": [1]}})");
  const Cocycle c = cocycle_from_json(j);
  CHECK(c.alpha[0] == kGoldenMean);
  CHECK(c.expr == herman(2.0, {1}));
  const Json p = Json::parse(R"({"cos": [{"k": [1], "amplitude": 0.1}], "constant": 0.5, "slope": [1]})");
  const TrigPoly tp = trig_poly_from_json(p, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
  CHECK(std::abs(tp(x) - Complex(0.2 + 0.5 + 0.1 * std::cos(kTwoPi * 0.2))) < 1e-15);
}

TEST_CASE("frequencies by name, decimal and partial quotients") {
  CHECK(parse_frequency(Json("golden")) == kGoldenMean);
  CHECK(parse_frequency(Json("0.25")) == 0.25);
  // [0; 1, 1, 1, ...] is the golden mean, [0; 2, 2, ...] the silver mean
  CHECK(std::abs(parse_frequency(Json::parse(R"({"partial_quotients": [1]})")) - kGoldenMean) < 1e-15);
  CHECK(std::abs(parse_frequency(Json::parse(R"({"partial_quotients": [2]})")) - kSilverMean) < 1e-15);
  // [0; 1, 2, 1, 2, ...] = (sqrt(3) - 1) / 2 from x = 1 / (1 + 1 / (2 + x))
  CHECK(std::abs(parse_frequency(Json::parse(R"({"partial_quotients": [1, 2]})")) - (std::sqrt(3.0) - 1.0)) < 1e-15);
}

TEST_CASE("malformed input raises ConfigError") {
  for (const char* s : {R"({"expr": {"node": "Rot"}})", R"({"alpha": "bronze", "expr": {"builder": "identity"}})",
                        R"({"alpha": 0.3, "expr": {"node": "Spin"}})", R"({"alpha": [0.3, 0.4], "dimension": 1,
                        "expr": {"builder": "identity"}})"}) {
    try {
      cocycle_from_json(Json::parse(s));
      FAIL("accepted " << s);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ConfigError);
    }
  }
  CHECK_THROWS_AS(read_json_file("/nonexistent/cocycle.json"), Error);
}
