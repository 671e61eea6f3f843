#include "sl2lab/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "sl2lab/barycenter.hpp"
#include "sl2lab/complexify.hpp"
#include "sl2lab/conjugacy.hpp"
#include "sl2lab/lyap.hpp"
#include "sl2lab/monotone.hpp"
#include "sl2lab/renorm.hpp"
#include "sl2lab/rotnum.hpp"
#include "sl2lab/section.hpp"

namespace sl2lab {

namespace {

const double kLn54 = std::log(1.25);

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

Family herman_twist() { return Family::rot_twist(Cocycle(v1(kGoldenMean), herman(2.0, {1}))); }

/// The twisted rotation R_{x + 0.1 cos 2 pi x} over the golden rotation.
Cocycle twisted_rotation(double amplitude = 0.1) {
  return Cocycle(v1(kGoldenMean), CocycleExpr::rot(TrigPoly::linear(v1(1.0)) + TrigPoly::cosine({1}, amplitude)));
}

StripCocycle certified(const Family& f, int nodes = 64) {
  return certify_strip(StripCocycle::analytic(f), 0.1, uniform_nodes(16), TorusGrid::uniform(f.dim(), nodes));
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& e) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(e[i]));
  }
  return affine_fit(lx, ly).slope;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A1: theta-average of L for herman(2, (1)) against ln(5/4).
void herman_average(CriterionReport& r) {
  const int theta_points = 64;
  const long n = 100000;
  r.parameters = {{"lambda", 2.0}, {"alpha", "golden"}, {"theta_points", theta_points}, {"N", n}};
  const auto t0 = std::chrono::steady_clock::now();
  const Cocycle c(v1(kGoldenMean), herman(2.0, {1}));
  const double avg = lyapunov_theta_average(c, theta_points, n, v1(0.0));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.details.push_back({{"theta_average", avg}, {"ln_5_4", kLn54}});
  r.check("relative_error", std::abs(avg - kLn54) / kLn54, "<=", 0.01);
  r.check("runtime_seconds", secs, "<=", 120.0);
}

// A2: zero exponent of twisted rotation models; affine rho profile of PhaseShift.
void rotation_rigidity(CriterionReport& r) {
  const long n = 100000;
  r.parameters = {{"N", n}, {"profile_points", 33}, {"profile_N", 4000}};
  double worst_l = 0.0;
  struct Case {
    std::string name;
    Cocycle c;
    Eigen::VectorXd w;
    double slope;
  };
  Eigen::VectorXd a2(2), w2(2);
  a2 << kGoldenMean, kSilverMean;
  w2 << 1.0, 0.5;
  const TrigPoly twist2 = TrigPoly::cosine({1, 0}, 0.1) + TrigPoly::sine({1, 1}, 0.05);
  std::vector<Case> cases;
  cases.push_back({"l=(1)", twisted_rotation(), v1(1.0), 1.0});
  cases.push_back({"l=(2)", Cocycle(v1(kGoldenMean), CocycleExpr::rot(TrigPoly::linear(v1(2.0)) + TrigPoly::sine({1}, 0.2))),
                   v1(1.0), 2.0});
  Eigen::VectorXd l2(2);
  l2 << 1.0, -2.0;
  cases.push_back({"l=(1,-2)", Cocycle(a2, CocycleExpr::rot(TrigPoly::linear(l2) + twist2)), w2, 0.0});
  std::vector<double> thetas;
  for (int i = 0; i <= 32; ++i) thetas.push_back(i / 32.0);
  for (const auto& cs : cases) {
    const double l = lyapunov_orbit(cs.c, Eigen::VectorXd::Zero(cs.c.dim()), n).value;
    worst_l = std::max(worst_l, std::abs(l));
    const auto prof = rho_profile(Family::phase_shift(cs.c, cs.w), thetas, Eigen::VectorXd::Zero(cs.c.dim()), 4000);
    std::vector<double> x, y;
    for (const auto& p : prof) {
      x.push_back(p.theta);
      y.push_back(p.rho);
    }
    const AffineFit fit = affine_fit(x, y);
    r.details.push_back({{"case", cs.name}, {"lyapunov", l}, {"profile_slope", fit.slope}, {"expected_slope", cs.slope},
                         {"profile_residual", fit.max_residual}});
    r.check("profile_residual " + cs.name, fit.max_residual, "<=", 2e-3);
    r.check("slope_error " + cs.name, std::abs(fit.slope - cs.slope), "<=", 1e-2);
  }
  r.check("max_lyapunov", worst_l, "<=", 1e-6);
}

// A3, A4, A6 share the U(t) profile of the Herman RotTwist strip.
struct HermanStrip {
  StripCocycle strip;
  UProfile u;
};

const HermanStrip& herman_strip() {
  static const HermanStrip h = [] {
    const StripCocycle s = certified(herman_twist());
    return HermanStrip{s, u_profile(s, {0.02, 0.04, 0.06, 0.08, 0.10}, uniform_nodes(32), TorusGrid::uniform(1, 512))};
  }();
  return h;
}

void u_affinity(CriterionReport& r) {
  const HermanStrip& h = herman_strip();
  r.parameters = {{"family", "RotTwist herman(2,(1))"}, {"levels", h.u.levels}, {"sigmas", 32}, {"nodes", 512},
                  {"side", side_name(h.strip.side)}, {"delta", h.strip.delta}};
  for (std::size_t i = 0; i < h.u.levels.size(); ++i)
    r.details.push_back({{"t", h.u.levels[i]}, {"U", h.u.u[i]}, {"U_q", h.u.u_q[i]}});
  r.details.push_back({{"fit_slope", h.u.fit.slope}, {"fit_intercept", h.u.fit.intercept}});
  r.check("relative_residual", h.u.relative_residual, "<=", 1e-3);
  r.check("slope_relative_error", std::abs(h.u.fit.slope - kTwoPi) / kTwoPi, "<=", 0.02);
  r.check("intercept_relative_error", std::abs(h.u.fit.intercept - kLn54) / kLn54, "<=", 0.01);
}

void schwarz_bound(CriterionReport& r) {
  const HermanStrip& h = herman_strip();
  r.parameters = {{"levels", h.u.levels}, {"side", side_name(h.strip.side)}};
  double worst = INFINITY;
  for (std::size_t i = 0; i < h.u.levels.size(); ++i) {
    const double bound = h.u.epsilon_hat[i] * h.u.levels[i];
    const double ratio = h.u.min_section_l[i] / bound;
    worst = std::min(worst, ratio);
    r.details.push_back({{"t", h.u.levels[i]}, {"epsilon_hat", h.u.epsilon_hat[i]},
                         {"min_section_L", h.u.min_section_l[i]}, {"ratio", ratio}});
  }
  r.check("min_L_over_epsilon_t", worst, ">=", 0.9);
}

void second_derivative(CriterionReport& r) {
  const TrigPoly zero = TrigPoly::constant(1, 0.0);
  const std::vector<double> levels{0.05, 0.025};
  r.parameters = {{"levels", levels}, {"theta_nodes", 4096}};
  const SecondDerivative hyp = second_derivative_limit(TrigPoly::cosine({1}, 1.0), zero, zero, levels);
  const SecondDerivative ell = second_derivative_limit(zero, zero, TrigPoly::cosine({1}, 1.0), levels);
  r.details.push_back({{"s", "s1=cos"}, {"v_t", hyp.values[0]}, {"v_t2", hyp.values[1]}, {"richardson", hyp.richardson}});
  r.details.push_back({{"s", "s3=cos"}, {"v_t", ell.values[0]}, {"v_t2", ell.values[1]}, {"richardson", ell.richardson}});
  r.check("s1_relative_error", std::abs(hyp.richardson - 0.5) / 0.5, "<=", 0.05);
  r.check("so2_limit", std::abs(ell.richardson), "<=", 1e-4);
}

void tau_q_consistency(CriterionReport& r) {
  const HermanStrip& h = herman_strip();
  double tq = 0.0;
  for (std::size_t i = 0; i < h.u.levels.size(); ++i) tq = std::max(tq, std::abs(h.u.u[i] - h.u.u_q[i]));
  // Sections of single sigmas on the Herman strip, on top of the U(t) averages.
  const TorusGrid g = TorusGrid::uniform(1, 512);
  double herman_res = h.u.max_residual;
  for (double t : {0.1, 0.04, 0.02}) {
    const DiskSection m = invariant_section(h.strip, 0.37, t, h.strip.side, g);
    const SectionLyapunov l = section_lyapunov(h.strip, m);
    tq = std::max(tq, std::abs(l.tau_form - l.q_form));
    herman_res = std::max(herman_res, m.residual);
    r.details.push_back({{"cocycle", "herman(2,(1))"}, {"t", t}, {"tau_form", l.tau_form}, {"q_form", l.q_form},
                         {"residual", m.residual}});
  }
  double rot_res = 0.0;
  const StripCocycle rm = certified(Family::phase_shift(twisted_rotation(), v1(1.0)));
  const StripCocycle rm2 = certified(Family::phase_shift(Cocycle(v1(kGoldenMean), rotation_model({1})), v1(1.0)));
  for (const StripCocycle* s : {&rm, &rm2})
    for (double t : {0.1, 0.05, 0.0125}) {
      const DiskSection m = invariant_section(*s, 0.3, t, s->side, TorusGrid::uniform(1, 256));
      const SectionLyapunov l = section_lyapunov(*s, m);
      tq = std::max(tq, std::abs(l.tau_form - l.q_form));
      rot_res = std::max(rot_res, m.residual);
      r.details.push_back({{"cocycle", s == &rm ? "R_{x+0.1cos}" : "R_x"}, {"t", t}, {"tau_form", l.tau_form},
                           {"q_form", l.q_form}, {"residual", m.residual}});
    }
  r.check("tau_q_difference", tq, "<=", 1e-6);
  r.check("rotation_section_residual", rot_res, "<=", 1e-10);
  r.check("herman_section_residual", herman_res, "<=", 1e-8);
}

void kotani(CriterionReport& r) {
  const std::vector<double> levels{0.1, 0.05, 0.025, 0.0125};
  r.parameters = {{"levels", levels}, {"sigma", 0.0}, {"nodes", 1024}};
  const auto rot = kotani_profile(certified(Family::phase_shift(Cocycle(v1(kGoldenMean), rotation_model({1})), v1(1.0))),
                                  0.0, levels, TorusGrid::uniform(1, 1024));
  double ip = 0.0, d2 = 0.0;
  for (const auto& p : rot) {
    ip = std::max(ip, std::abs(p.values.i_plus - 1.0));
    d2 = std::max(d2, p.values.d2);
    r.details.push_back({{"cocycle", "R_x"}, {"t", p.t}, {"I_plus", p.values.i_plus}, {"I_minus", p.values.i_minus},
                         {"D2", p.values.d2}});
  }
  r.check("rotation_I_plus_error", ip, "<=", 1e-6);
  r.check("rotation_D2", d2, "<=", 1e-10);
  const auto herm = kotani_profile(certified(herman_twist()), 0.0, levels, TorusGrid::uniform(1, 1024));
  // Pilot values of this construction, recorded as a regression fixture.
  const double fixture[] = {1.03117, 1.13604, 1.38348, 1.90216};
  double min_step = INFINITY, fixture_err = 0.0;
  for (std::size_t i = 0; i < herm.size(); ++i) {
    if (i) min_step = std::min(min_step, herm[i].values.i_plus - herm[i - 1].values.i_plus);
    fixture_err = std::max(fixture_err, std::abs(herm[i].values.i_plus - fixture[i]));
    r.details.push_back({{"cocycle", "herman(2,(1))"}, {"t", herm[i].t}, {"I_plus", herm[i].values.i_plus},
                         {"I_minus", herm[i].values.i_minus}, {"D2", herm[i].values.d2}});
  }
  r.check("herman_min_I_plus_increase", min_step, ">=", 1e-12);
  r.check("herman_fixture_error", fixture_err, "<=", 1e-4);
}

void derivative_bound(CriterionReport& r) {
  const TorusGrid g = TorusGrid::uniform(1, 64);
  const Family ps = Family::phase_shift(Cocycle(v1(kGoldenMean), rotation_model({1})), v1(1.0));
  const long n = 20000;
  double worst = INFINITY;
  r.parameters = {{"family", "PhaseShift(1) on R_x"}, {"h", 0.05}, {"N", n}};
  for (double theta : {0.0, 0.3, 0.71}) {
    const DerivativeBound b = derivative_bound_check(ps, theta, 0.05, v1(0.0), n, g);
    worst = std::min(worst, std::abs(b.drho));
    r.details.push_back({{"theta_star", theta}, {"drho", b.drho}, {"threshold", b.threshold}, {"lyapunov", b.lyapunov},
                         {"monotone", monotone_status_name(b.monotone)}});
    r.check("threshold theta*=" + fmt(theta), b.threshold, ">=", 1.0 - 1e-12);
  }
  r.check("min_abs_drho", worst, ">=", 1.0 - 5e-3);
}

void renorm_algebra(CriterionReport& r) {
  const CFData cf = continued_fraction(kGoldenMean, 10);
  r.parameters = {{"alpha", "golden"}, {"levels", "1..6"}};
  double comm = 0.0;
  for (const Cocycle& c : {Cocycle(v1(kGoldenMean), herman(2.0, {1})), twisted_rotation()})
    for (int n = 1; n <= 6; ++n) {
      const RenormPair p = commuting_pair(c, cf, n);
      comm = std::max(comm, p.commutation_residual);
      r.details.push_back({{"check", "commutation"}, {"n", n}, {"residual", p.commutation_residual}});
    }
  r.check("commutation_residual", comm, "<=", 1e-8);
  double ident = 0.0;
  for (double alpha : {kGoldenMean, kSilverMean, std::sqrt(3.0) - 1.0, M_PI - 3.0})
    {
    const CFData d = continued_fraction(alpha, 10);
    for (int n = 1; n < d.depth(); ++n) {
      const double lhs = 1.0 / d.beta_at(n - 1);
      const double rhs = static_cast<double>(d.q_at(n)) + d.alphas[static_cast<std::size_t>(n)] * d.q_at(n - 1);
      ident = std::max(ident, std::abs(lhs - rhs) / lhs);
    }
  }
  r.check("beta_identity_relative", ident, "<=", 1e-10);
  long flips = 0, wrong = 0;
  for (int deg : {1, 2, -1})
    for (int n = 1; n <= 6; ++n) {
      const Representative rep =
          renorm_representative(normalizing_map(commuting_pair(Cocycle(v1(kGoldenMean), rotation_model({deg})), cf, n)), 256);
      const int expected = (n % 2 == 0) ? deg : -deg;
      ++flips;
      if (rep.degree() != expected) ++wrong;
      r.details.push_back({{"check", "degree"}, {"deg", deg}, {"n", n}, {"degree", rep.degree()}, {"expected", expected}});
    }
  r.check("degree_flip_mismatches", static_cast<double>(wrong), "<=", 0.0);
  r.parameters["degree_cases"] = flips;
}

void renorm_cascade_check(CriterionReport& r) {
  r.parameters = {{"cocycle", "R_{x+0.1cos 2pi x}"}, {"alpha", "golden"}, {"levels", "1..5"}, {"x_star", 0.0}};
  const std::vector<RenormLevel> levels = renorm_cascade(twisted_rotation(), 5);
  // Pilot values of this construction, recorded as a regression fixture.
  const std::vector<double> fixture = {7.099484e-01, 4.181004e-01, 8.525276e-02, 9.767450e-03, 2.670294e-04};
  double worst_ratio = 0.0, fixture_err = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    r.details.push_back({{"n", l.n}, {"distance", l.distance}, {"theta_hat", l.theta_hat}, {"degree", l.degree},
                         {"commutation", l.commutation_residual}, {"normalizing", l.normalizing_residual}});
    if (i) worst_ratio = std::max(worst_ratio, l.distance / levels[i - 1].distance);
    fixture_err = std::max(fixture_err, std::abs(l.distance - fixture[i]) / fixture[i]);
  }
  r.check("max_distance_ratio", worst_ratio, "<=", 1.1);
  r.check("fixture_relative_error", fixture_err, "<=", 1e-5);
  double exact_dist = 0.0;
  for (int deg : {1, 2})
    for (const auto& l : renorm_cascade(Cocycle(v1(kGoldenMean), rotation_model({deg})), 5))
      exact_dist = std::max(exact_dist, l.distance);
  // Exact models R_{theta0 + (-1)^n deg x} sampled as representatives.
  double theta_err = 0.0;
  for (int n : {1, 2, 5})
    for (double theta0 : {0.0, 0.123456789, 0.75}) {
      Representative rep;
      const double s = ((n % 2 == 0) ? 1.0 : -1.0) * 2;
      for (int j = 0; j < 128; ++j) {
        rep.nodes.push_back(j / 128.0);
        rep.values.push_back(rotation(theta0 + s * j / 128.0));
      }
      const RotationFit f = rotation_distance(rep, 2, n);
      exact_dist = std::max(exact_dist, f.distance);
      const double d = std::abs(f.theta - theta0);
      theta_err = std::max(theta_err, std::min(d, 1.0 - d));
    }
  r.check("exact_model_distance", exact_dist, "<=", 1e-10);
  r.check("exact_model_theta_error", theta_err, "<=", 1e-8);
}

void barycenter_suite(CriterionReport& r, const SuiteOptions& opt) {
  const double tol = 1e-8;
  r.parameters = {{"maps", opt.barycenter_maps}, {"tol", tol}, {"atoms", 5}, {"seed", opt.seed}};
  std::mt19937_64 gen(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto disk_point = [&](double rmax) { return std::polar(std::sqrt(u01(gen)) * rmax, kTwoPi * u01(gen)); };
  BarycenterOptions bo;
  bo.tol = tol;
  double worst = 0.0;
  long nonmonotone = 0;
  for (int i = 0; i < opt.barycenter_maps; ++i) {
    std::vector<DiskAtom> atoms;
    for (int k = 0; k < 5; ++k) atoms.push_back({disk_point(0.8), 0.1 + 0.9 * u01(gen)});
    const DiskMeasure mu = DiskMeasure::normalized(atoms);
    Mat2C rot = Mat2C::Zero();
    const Complex e = std::polar(1.0, kTwoPi * u01(gen));
    rot(0, 0) = e;
    rot(1, 1) = std::conj(e);
    const Mat2C m = rot * disk_automorphism_to_origin(disk_point(0.8));
    const BarycenterResult b = conformal_barycenter(mu, bo);
    const BarycenterResult bm = conformal_barycenter(mu.pushed(m), bo);
    const double err = std::abs(bm.point - mobius(m, b.point));
    worst = std::max(worst, err);
    if (!b.phi_monotone || !bm.phi_monotone) ++nonmonotone;
    r.details.push_back({{"map", i}, {"equivariance_error", err}, {"iterations", b.iterations},
                         {"phi_first", b.phi_trace.front()}, {"phi_last", b.phi_trace.back()}});
  }
  r.check("equivariance_error", worst, "<=", 10 * tol);
  r.check("phi_nonmonotone_runs", static_cast<double>(nonmonotone), "<=", 0.0);
  double sym = 0.0;
  for (int k : {2, 3, 4, 5, 7})
    for (double rad : {0.3, 0.8}) {
      std::vector<DiskAtom> atoms;
      for (int j = 0; j < k; ++j) atoms.push_back({std::polar(rad, kTwoPi * j / k + 0.1), 1.0});
      const double e = std::abs(conformal_barycenter(DiskMeasure::normalized(atoms), bo).point);
      sym = std::max(sym, e);
      r.details.push_back({{"symmetric_k", k}, {"radius", rad}, {"abs_barycenter", e}});
    }
  r.check("symmetric_abs_barycenter", sym, "<=", tol);
}

void ah_machinery(CriterionReport& r) {
  r.parameters = {{"etas", {1, 2, 3}}, {"dbar_levels", {0.1, 0.05, 0.025}}, {"sigma", 0.23}, {"samples", 32}};
  double moments = 0.0;
  Eigen::VectorXd cosines(32);
  for (int j = 0; j < 32; ++j) cosines[j] = std::cos(kTwoPi * j / 32.0);
  const ScalarSpectrum spec = ScalarSpectrum::from_samples(cosines);
  for (double eta : {1.0, 2.0, 3.0}) {
    const AHKernel k = ah_kernel(eta);
    for (double m : k.moment_residuals) moments = std::max(moments, m);
    std::vector<double> ts{0.1, 0.05, 0.025}, res;
    for (double t : ts) res.push_back(std::abs(spec.dbar(k, Complex(0.23, t))));
    const double slope = loglog_slope(ts, res);
    r.details.push_back({{"eta", eta}, {"order", k.order}, {"dbar_slope", slope}, {"dbar_t0.1", res[0]},
                         {"dbar_t0.025", res[2]}});
    r.check("dbar_slope_minus_floor_eta eta=" + fmt(eta), std::abs(slope - std::floor(eta)), "<=", 0.3);
  }
  r.check("moment_residual", moments, "<=", 1e-8);
  const SampledMatrix m = SampledMatrix::from_function(64, [](double x) { return Mat2R(rotation(x)); });
  const StripCocycle s = ah_extend_cocycle(m, ah_kernel(2.0), v1(kGoldenMean));
  double ext = 0.0;
  for (double x : {0.0, 0.1, 0.55})
    for (double sigma : {0.0, 0.2, 0.7}) {
      const Mat2C e = s.eval(v1(x), Complex(sigma, 0.02));
      ext = std::max(ext, (e - rotation(Complex(x + sigma, 0.02))).cwiseAbs().maxCoeff());
    }
  r.check("sampled_extension_error", ext, "<=", 1e-4);
  r.note = "dbar slope is floor(eta) + 1 for a kernel with moments through order floor(eta + 1)";
}

void cohomological(CriterionReport& r) {
  r.parameters = {{"max_mode", 5}, {"stages", 3}, {"push_cocycle", "R_{x+0.1cos 2pi x}"}};
  // Residuals on Diophantine frequencies.
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  Eigen::VectorXd a2(2);
  a2 << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  for (const Eigen::VectorXd& alpha : {v1(kGoldenMean), v1(kSilverMean), a2}) {
    const int d = static_cast<int>(alpha.size());
    TrigPoly phi = TrigPoly::constant(d, 0.25);
    for (int i = 0; i < 12; ++i) {
      std::vector<int> k(static_cast<std::size_t>(d));
      for (auto& kj : k) kj = static_cast<int>(std::lround(5.0 * u(gen)));
      if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) continue;
      phi = phi + TrigPoly::cosine(k, 0.3 * u(gen), u(gen));
    }
    const CohomologicalSolution sol = solve_cohomological(phi, alpha);
    worst = std::max(worst, sol.residual);
    r.details.push_back({{"check", "residual"}, {"dim", d}, {"residual", sol.residual}, {"c", sol.c}});
  }
  r.check("cohomological_residual", worst, "<=", 1e-9);
  // Resonances: alpha rational, oracle is the integer condition q | <k, p>.
  long mismatches = 0;
  struct Res {
    std::vector<int> p;
    int q;
  };
  for (const Res& rs : {Res{{1}, 2}, Res{{1}, 3}, Res{{1, 2}, 4}, Res{{2, 3}, 5}}) {
    const int d = static_cast<int>(rs.p.size());
    Eigen::VectorXd alpha(d);
    for (int j = 0; j < d; ++j) alpha[j] = static_cast<double>(rs.p[static_cast<std::size_t>(j)]) / rs.q;
    TrigPoly phi(d);
    std::vector<long> expected;
    std::vector<int> k(static_cast<std::size_t>(d), -3);
    while (true) {
      if (!std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) {
        phi.add(k, Complex(0.01, 0.0));
        long kp = 0;
        for (int j = 0; j < d; ++j) kp += static_cast<long>(k[static_cast<std::size_t>(j)]) * rs.p[static_cast<std::size_t>(j)];
        if (kp % rs.q == 0) expected.insert(expected.end(), k.begin(), k.end());
      }
      int j = d - 1;
      while (j >= 0 && k[static_cast<std::size_t>(j)] == 3) k[static_cast<std::size_t>(j--)] = -3;
      if (j < 0) break;
      ++k[static_cast<std::size_t>(j)];
    }
    std::vector<long> got;
    try {
      solve_cohomological(phi, alpha);
    } catch (const Error& e) {
      if (e.code() == Errc::SmallDivisor) got = e.detail();
    }
    auto sorted_modes = [d](std::vector<long> flat) {
      std::vector<std::vector<long>> modes;
      for (std::size_t i = 0; i + static_cast<std::size_t>(d) <= flat.size(); i += static_cast<std::size_t>(d))
        modes.emplace_back(flat.begin() + static_cast<long>(i), flat.begin() + static_cast<long>(i) + d);
      std::sort(modes.begin(), modes.end());
      return modes;
    };
    const bool ok = !expected.empty() && sorted_modes(got) == sorted_modes(expected);
    if (!ok) ++mismatches;
    r.details.push_back({{"check", "small_divisor"}, {"q", rs.q}, {"dim", d},
                         {"expected_modes", static_cast<long>(expected.size()) / d},
                         {"reported_modes", static_cast<long>(got.size()) / d}});
  }
  r.check("small_divisor_mismatches", static_cast<double>(mismatches), "<=", 0.0);
  // push_to_model: distances must strictly decrease from stage to stage.
  const double floor = 1e-14;
  const auto stages = push_to_model(twisted_rotation());
  long violations = 0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    r.details.push_back({{"check", "push_to_model"}, {"stage", stages[s].stage}, {"distance", stages[s].distance},
                         {"max_mode", stages[s].max_mode}, {"l", stages[s].l[0]}});
    if (s > 0 && !(stages[s].distance < stages[s - 1].distance)) ++violations;
  }
  r.check("push_stages", static_cast<double>(stages.size() - 1), ">=", 3.0);
  r.check("push_strict_decrease_violations", static_cast<double>(violations), "<=", 0.0);
  r.check("push_stage1_distance", stages.size() > 1 ? stages[1].distance : INFINITY, "<=", floor);
  r.note = "a single-mode phase is resolved exactly at stage 1; later stages repeat the same conjugacy";
}

struct Criterion {
  const char* id;
  const char* title;
};

constexpr Criterion kCriteria[] = {
    {"A1", "Herman average of L equals ln(5/4)"},
    {"A2", "rotation rigidity and affine rho profile"},
    {"A3", "U(t) affine with slope 2 pi"},
    {"A4", "Schwarz bound L >= 0.9 epsilon t"},
    {"A5", "second-derivative limit"},
    {"A6", "tau/q consistency and section residuals"},
    {"A7", "Kotani diagnostics"},
    {"A8", "derivative bound"},
    {"A9", "renormalization algebra"},
    {"A10", "convergence to the rotation model"},
    {"A11", "conformal barycenter"},
    {"A12", "asymptotically holomorphic extension"},
    {"A13", "cohomological equation and push to model"},
};

}  // namespace

bool CriterionReport::pass() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void CriterionReport::check(std::string name, double measured, const std::string& relation, double bound) {
  bool ok = false;
  if (relation == "<=") ok = measured <= bound;
  else if (relation == ">=") ok = measured >= bound;
  else throw Error(Errc::InvalidArgument, "check relation must be <= or >=");
  checks.push_back(Check{std::move(name), measured, relation, bound, ok});
}

const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& c : kCriteria) v.emplace_back(c.id);
    return v;
  }();
  return ids;
}

std::vector<std::string> suite_members(const std::string& name) {
  if (name == "identities") return {"A1", "A2", "A3", "A4", "A5", "A6"};
  if (name == "kotani") return {"A7", "A8"};
  if (name == "renorm-cascade") return {"A9", "A10"};
  if (name == "monotone-audit") return {"A2", "A8"};
  if (name == "barycenter") return {"A11"};
  if (name == "ah") return {"A12"};
  if (name == "conjugacy") return {"A13"};
  if (name == "all") return criterion_ids();
  for (const auto& id : criterion_ids())
    if (id == name) return {id};
  throw Error(Errc::ConfigError, "unknown suite '" + name + "'");
}

CriterionReport run_criterion(const std::string& id, const SuiteOptions& opt) {
  CriterionReport r;
  r.id = id;
  const Criterion* c = nullptr;
  for (const auto& k : kCriteria)
    if (id == k.id) c = &k;
  if (!c) throw Error(Errc::ConfigError, "unknown criterion '" + id + "'");
  r.title = c->title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (id == "A1") herman_average(r);
    else if (id == "A2") rotation_rigidity(r);
    else if (id == "A3") u_affinity(r);
    else if (id == "A4") schwarz_bound(r);
    else if (id == "A5") second_derivative(r);
    else if (id == "A6") tau_q_consistency(r);
    else if (id == "A7") kotani(r);
    else if (id == "A8") derivative_bound(r);
    else if (id == "A9") renorm_algebra(r);
    else if (id == "A10") renorm_cascade_check(r);
    else if (id == "A11") barycenter_suite(r, opt);
    else if (id == "A12") ah_machinery(r);
    else if (id == "A13") cohomological(r);
  } catch (const Error& e) {
    r.check(std::string("error ") + std::string(errc_name(e.code())), 1.0, "<=", 0.0);
    r.note = e.what();
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Json to_json(const CriterionReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"measured", c.measured}, {"relation", c.relation}, {"bound", c.bound},
                      {"pass", c.pass}});
  Json j = {{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"parameters", r.parameters},
            {"checks", checks}, {"runtime_seconds", r.runtime_seconds}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string summary_line(const CriterionReport& r) {
  std::ostringstream s;
  s << r.id << ' ' << (r.pass() ? "PASS" : "FAIL") << ' ' << r.title << " |";
  for (const auto& c : r.checks) s << ' ' << c.name << '=' << fmt(c.measured) << c.relation << fmt(c.bound);
  return s.str();
}

std::string details_csv(const std::vector<CriterionReport>& reports) {
  std::ostringstream s;
  s << "criterion,row,key,value\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.details.size(); ++i)
      for (const auto& [k, v] : r.details[i].items())
        s << r.id << ',' << i << ',' << k << ',' << (v.is_number_float() ? exact(v.get<double>()) : v.dump()) << '\n';
  return s.str();
}

}  // namespace sl2lab
