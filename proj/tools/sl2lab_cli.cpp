// sl2lab command-line front end. Every subcommand reads its options from flags
// or from a JSON config (--config; flags win), writes a CSV table (--csv, "-"
// for stdout) and optionally a JSON summary (--json). Exit status: 0 when all
// checks pass, 1 on a failed check or a numerical failure, 2 on usage errors.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json_config.hpp"
#include "sl2lab/barycenter.hpp"
#include "sl2lab/complexify.hpp"
#include "sl2lab/conjugacy.hpp"
#include "sl2lab/io.hpp"
#include "sl2lab/lyap.hpp"
#include "sl2lab/monotone.hpp"
#include "sl2lab/parallel.hpp"
#include "sl2lab/renorm.hpp"
#include "sl2lab/rotnum.hpp"
#include "sl2lab/section.hpp"
#include "sl2lab/suite.hpp"

namespace sl2lab::cli {
namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(Errc::ConfigError, what); }

/// Column table; doubles at 17 significant digits so equal runs give equal bytes.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  Table& row() {
    rows_.emplace_back();
    return *this;
  }
  Table& operator<<(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    rows_.back().emplace_back(buf);
    return *this;
  }
  Table& operator<<(long v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
  }
  Table& operator<<(int v) { return *this << static_cast<long>(v); }
  Table& operator<<(const std::string& v) {
    rows_.back().push_back(v);
    return *this;
  }
  Table& operator<<(const char* v) { return *this << std::string(v); }

  std::string str() const {
    std::ostringstream s;
    for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "," : "") << columns_[i];
    s << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
      s << '\n';
    }
    return s.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// What a subcommand produced.
struct Outcome {
  CriterionReport report;
  Json results = Json::object();
  std::string csv;
};

/// Options shared by every subcommand.
struct Common {
  std::string csv = "-";
  std::string json;
  std::string save_config;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) usage("cannot write '" + path + "'");
  out << text;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void emit(const CLI::App* app, const Common& common, Outcome& out, double seconds) {
  out.report.runtime_seconds = seconds;
  write_text(common.csv, out.csv);
  Json summary = to_json(out.report);
  summary["command"] = out.report.id;
  summary["parameters"] = JsonConfig::options_json(app, true);
  summary["results"] = out.results;
  summary["generated"] = utc_now();
  write_text(common.json, summary.dump(2) + "\n");
  for (const auto& c : out.report.checks)
    if (!c.pass)
      std::cerr << app->get_name() << ": check " << c.name << " failed: " << c.measured << " not " << c.relation << ' '
                << c.bound << '\n';
}

/// Inline JSON text or a file path.
Json document(const std::string& text, const char* what) {
  if (text.empty()) usage(std::string("missing --") + what);
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return Json::parse(text);
    } catch (const Json::exception& e) {
      usage(std::string("--") + what + " is not valid JSON: " + e.what());
    }
  }
  return read_json_file(text);
}

Cocycle load_cocycle(const std::string& s) { return cocycle_from_json(document(s, "cocycle")); }
Family load_family(const std::string& s) { return family_from_json(document(s, "family")); }

Eigen::VectorXd point(const std::vector<double>& v, int dim) {
  if (v.empty()) return Eigen::VectorXd::Zero(dim);
  if (static_cast<int>(v.size()) != dim) usage("--x0 has the wrong dimension");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) usage("a sweep needs at least 2 points");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

TorusGrid xgrid(const Eigen::VectorXd& alpha, int nodes) {
  if (nodes < 1) usage("--x-nodes must be positive");
  return TorusGrid::standard(alpha, nodes);
}

/// Strip extension of a family: analytic continuation or an AH extension.
StripCocycle strip_of(const Family& f, const std::string& mode, double eta, int theta_samples, double tmax,
                      int sigmas, int x_nodes, StripReport* report = nullptr) {
  StripCocycle s = [&] {
    if (mode == "analytic") return StripCocycle::analytic(f);
    if (mode == "ah") return StripCocycle::ah(f, ah_kernel(eta), theta_samples);
    usage("--extension must be analytic or ah");
  }();
  return certify_strip(std::move(s), tmax, uniform_nodes(sigmas), xgrid(f.alpha(), x_nodes), report);
}

struct StripOptions {
  std::string extension = "analytic";
  double eta = 2.0;
  int theta_samples = 64;
  double tmax = 0.1;
  int sigmas = 16;

  void add(CLI::App* app) {
    app->add_option("--extension", extension, "analytic or ah")->capture_default_str();
    app->add_option("--eta", eta, "AH smoothness for --extension ah")->capture_default_str();
    app->add_option("--theta-samples", theta_samples, "theta samples for --extension ah")->capture_default_str();
    app->add_option("--tmax", tmax, "largest strip level probed")->capture_default_str();
    app->add_option("--strip-sigmas", sigmas, "sigma nodes used to certify the strip")->capture_default_str();
  }
  StripCocycle build(const Family& f, int x_nodes, StripReport* report = nullptr) const {
    return strip_of(f, extension, eta, theta_samples, tmax, sigmas, x_nodes, report);
  }
};

/// Registers a subcommand with the shared output options and a runner.
CLI::App* command(CLI::App& parent, const std::string& name, const std::string& help, Common& common,
                  std::function<Outcome()> body, std::vector<std::function<void()>>& runners) {
  CLI::App* app = parent.add_subcommand(name, help);
  app->config_formatter(std::make_shared<JsonConfig>());
  app->add_option("--csv", common.csv, "CSV output path, - for stdout, empty to skip")->capture_default_str();
  app->add_option("--json", common.json, "JSON summary path, - for stdout");
  app->add_option("--save-config", common.save_config, "write the effective options as a JSON config");
  app->callback([app, &common, body, &runners] {
    runners.push_back([app, &common, body] {
      if (!common.save_config.empty()) write_text(common.save_config, app->config_to_str(true, false));
      const auto t0 = std::chrono::steady_clock::now();
      Outcome out = body();
      out.report.id = app->get_name();
      out.report.title = app->get_description();
      emit(app, common, out, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (!out.report.checks.empty() && !out.report.pass()) std::exit(1);
    });
  });
  return app;
}

struct Cli {
  CLI::App app{"Numerical laboratory for quasiperiodic SL(2,R) cocycles"};
  Common common;
  std::vector<std::function<void()>> runners;
  int workers = 0;

  // lyapunov
  std::string cocycle, family;
  long n = 100000;
  std::vector<double> x0;
  int theta_points = 0;
  int x_nodes = 0;
  double expect = NAN, rtol = 0.01;
  bool complex_orbit = false;

  // rotnum
  double theta_min = 0.0, theta_max = 1.0, imag_level = 0.0, max_residual = INFINITY;
  int points = 33;

  // monotone
  int monotone_thetas = 32;

  // strip / section / uprofile / kotani
  StripOptions strip;
  double sigma = 0.0, t = 0.05, section_tol = 1e-8;
  bool minus = false;
  std::vector<double> levels;
  int sigmas = 32;

  // d2l
  std::string s1 = R"({"dim": 1})", s2 = R"({"dim": 1})", s3 = R"({"dim": 1})";
  int theta_nodes = 4096;

  // barycenter
  std::string atoms;
  double tol = 1e-8;
  bool exact = false;
  int cap = static_cast<int>(kAtomWorkingCap);

  // renorm
  int depth = 5, rep_nodes = kRepresentativeNodes;
  double x_star = 0.0;

  // conjugate
  std::string mode = "push-to-model", phi, section_file;
  std::vector<std::string> alpha_text;
  double divisor_cut = kDivisorCut;
  int stages = 3;

  // suite / run
  std::string suite_name;
  std::uint64_t seed = SuiteOptions{}.seed;
  int barycenter_maps = SuiteOptions{}.barycenter_maps;
  double lambda = 2.0;
  std::string alpha_name = "golden";

  Cli() {
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "JSON config of the chosen subcommand; flags override its values");
    app.add_option("--workers", workers, std::string("worker threads (overrides ") + kWorkersEnv + ")");
    add_lyapunov();
    add_rotnum();
    add_monotone();
    add_strip();
    add_section();
    add_uprofile();
    add_d2l();
    add_kotani();
    add_barycenter();
    add_renorm();
    add_conjugate();
    add_suite();
    add_run();
  }

  void add_lyapunov() {
    auto* a = command(app, "lyapunov", "Lyapunov exponent along an orbit, averaged over RotTwist, or bounded from above",
                      common, [this] { return lyapunov(); }, runners);
    a->add_option("--cocycle", cocycle, "cocycle JSON file or inline JSON")->required();
    a->add_option("--N", n, "iterates")->capture_default_str();
    a->add_option("--x0", x0, "base point (default 0)");
    a->add_option("--theta-points", theta_points, "average over R_theta A at j / theta-points");
    a->add_option("--x-nodes", x_nodes, "also report the grid upper bound and the Herman right-hand side");
    a->add_flag("--complex", complex_orbit, "complex arithmetic (for complex-valued trees)");
    a->add_option("--expect", expect, "expected value checked with --rtol");
    a->add_option("--rtol", rtol, "relative tolerance for --expect")->capture_default_str();
  }

  Outcome lyapunov() {
    const Cocycle c = load_cocycle(cocycle);
    const Eigen::VectorXd p = point(x0, c.dim());
    Outcome out;
    Table tab({"quantity", "value", "error_proxy"});
    double value = 0.0;
    if (theta_points > 0) {
      value = lyapunov_theta_average(c, theta_points, n, p);
      tab.row() << "theta_average" << value << 0.0;
    } else {
      const LyapEstimate e = complex_orbit ? lyapunov_orbit_complex(c, p, n) : lyapunov_orbit(c, p, n);
      value = e.value;
      tab.row() << "orbit" << e.value << e.error_proxy;
      out.results["error_proxy"] = e.error_proxy;
    }
    out.results["L"] = value;
    if (x_nodes > 0) {
      const TorusGrid g = xgrid(c.alpha, x_nodes);
      const double upper = lyapunov_upper(c, n, g), rhs = herman_average_rhs(c.expr, g);
      tab.row() << "upper_bound" << upper << 0.0;
      tab.row() << "herman_rhs" << rhs << 0.0;
      out.results["upper_bound"] = upper;
      out.results["herman_rhs"] = rhs;
    }
    if (!std::isnan(expect)) out.report.check("relative_error", std::abs(value - expect) / std::abs(expect), "<=", rtol);
    out.csv = tab.str();
    return out;
  }

  void add_rotnum() {
    auto* a = command(app, "rotnum", "rho profile of a family, or the fibered rotation number of a cocycle", common,
                      [this] { return rotnum(); }, runners);
    a->add_option("--family", family, "family JSON; sweeps theta");
    a->add_option("--cocycle", cocycle, "cocycle JSON; single fibered rotation number");
    a->add_option("--N", n, "iterates")->capture_default_str();
    a->add_option("--x0", x0, "base point (default 0)");
    a->add_option("--theta-min", theta_min)->capture_default_str();
    a->add_option("--theta-max", theta_max)->capture_default_str();
    a->add_option("--points", points, "theta points")->capture_default_str();
    a->add_option("--imag", imag_level, "imaginary part of theta along the sweep")->capture_default_str();
    a->add_option("--max-residual", max_residual, "check the affine-fit residual of the profile");
  }

  Outcome rotnum() {
    Outcome out;
    if (family.empty() == cocycle.empty()) usage("give exactly one of --family and --cocycle");
    if (!cocycle.empty()) {
      const Cocycle c = load_cocycle(cocycle);
      const FiberedRotation r = fibered_rotation_number(c, point(x0, c.dim()), n);
      Table tab({"rho_mod1", "lift_slope"});
      tab.row() << r.value_mod1 << r.lift_slope;
      out.results = {{"rho_mod1", r.value_mod1}, {"lift_slope", r.lift_slope}};
      out.csv = tab.str();
      return out;
    }
    const Family f = load_family(family);
    const auto prof = rho_profile(f, linspace(theta_min, theta_max, points), point(x0, f.dim()), n, imag_level);
    Table tab({"theta", "rho", "tolerance"});
    std::vector<double> x, y;
    for (const auto& p : prof) {
      tab.row() << p.theta << p.rho << p.tolerance;
      x.push_back(p.theta);
      y.push_back(p.rho);
    }
    const AffineFit fit = affine_fit(x, y);
    out.results = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"max_residual", fit.max_residual}};
    if (std::isfinite(max_residual)) out.report.check("affine_residual", fit.max_residual, "<=", max_residual);
    out.csv = tab.str();
    return out;
  }

  void add_monotone() {
    auto* a = command(app, "monotone", "certify the monotonicity constant of a family", common,
                      [this] { return monotone(); }, runners);
    a->add_option("--family", family, "family JSON")->required();
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 64)");
    a->add_option("--theta-min", theta_min)->capture_default_str();
    a->add_option("--theta-max", theta_max)->capture_default_str();
    a->add_option("--theta-points", monotone_thetas, "theta nodes")->capture_default_str();
  }

  Outcome monotone() {
    const Family f = load_family(family);
    const int nodes = x_nodes > 0 ? x_nodes : 64;
    const MonotonicityReport r = monotonicity_constant(f, xgrid(f.alpha(), nodes),
                                                       monotone_thetas == 1 ? std::vector<double>{theta_min}
                                                                            : linspace(theta_min, theta_max, monotone_thetas));
    Outcome out;
    Table tab({"status", "epsilon", "lipschitz_margin", "min_speed", "max_speed", "argmin_theta", "argmin_x0",
               "argmin_y_angle"});
    tab.row() << monotone_status_name(r.status) << r.epsilon << r.lipschitz_margin << r.min_speed << r.max_speed
              << r.argmin.theta << (r.argmin.x.size() ? r.argmin.x[0] : 0.0) << r.argmin.y_angle;
    out.results = {{"status", monotone_status_name(r.status)}, {"epsilon", r.epsilon},
                   {"lipschitz_margin", r.lipschitz_margin}, {"min_speed", r.min_speed}, {"max_speed", r.max_speed}};
    out.report.check("certified", r.certified() ? 1.0 : 0.0, ">=", 1.0);
    out.csv = tab.str();
    return out;
  }

  void add_strip() {
    auto* a = command(app, "strip", "find and certify the contracting strip of a family", common,
                      [this] { return strip_cmd(); }, runners);
    a->add_option("--family", family, "family JSON")->required();
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 64)");
    strip.add(a);
  }

  Outcome strip_cmd() {
    const Family f = load_family(family);
    StripReport rep;
    const StripCocycle s = strip.build(f, x_nodes > 0 ? x_nodes : 64, &rep);
    Outcome out;
    Table tab({"t", "side", "contracts", "worst", "epsilon_hat"});
    for (const auto& p : rep.probes)
      tab.row() << p.t << side_name(rep.side) << (p.contracts ? 1 : 0) << p.worst << p.epsilon_hat;
    out.results = {{"delta", s.delta}, {"side", side_name(s.side)}, {"epsilon_hat", rep.epsilon_hat},
                   {"certified", s.certified}};
    out.report.check("certified", s.certified ? 1.0 : 0.0, ">=", 1.0);
    out.csv = tab.str();
    return out;
  }

  void add_section() {
    auto* a = command(app, "section", "invariant disk section at one strip level", common,
                      [this] { return section(); }, runners);
    a->add_option("--family", family, "family JSON")->required();
    a->add_option("--sigma", sigma, "real part of theta")->capture_default_str();
    a->add_option("--t", t, "strip level (> 0, on the certified side)")->capture_default_str();
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 256)");
    a->add_flag("--minus", minus, "backward section m- at the mirrored level");
    a->add_option("--tol", section_tol, "check on the invariance residual")->capture_default_str();
    strip.add(a);
  }

  Outcome section() {
    const Family f = load_family(family);
    const int nodes = x_nodes > 0 ? x_nodes : 256;
    const StripCocycle s = strip.build(f, std::min(nodes, 64));
    const TorusGrid g = xgrid(f.alpha(), nodes);
    const DiskSection m = minus ? invariant_section_minus(s, sigma, t, s.side, g) : invariant_section(s, sigma, t, s.side, g);
    Outcome out;
    std::vector<std::string> cols;
    for (int j = 0; j < f.dim(); ++j) cols.push_back(f.dim() == 1 ? "x" : "x" + std::to_string(j + 1));
    for (const char* c : {"re", "im", "abs"}) cols.emplace_back(c);
    Table tab(cols);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      tab.row();
      for (int j = 0; j < f.dim(); ++j) tab << g.points[i][j];
      tab << m.values[i].real() << m.values[i].imag() << std::abs(m.values[i]);
    }
    out.results = {{"side", side_name(s.side)}, {"residual", m.residual}, {"iterations", m.iterations},
                   {"kind", minus ? "minus" : "plus"}};
    if (!minus) {
      const SectionLyapunov l = section_lyapunov(s, m);
      out.results["L_tau"] = l.tau_form;
      out.results["L_q"] = l.q_form;
    }
    out.report.check("residual", m.residual, "<=", section_tol);
    out.csv = tab.str();
    return out;
  }

  void add_uprofile() {
    auto* a = command(app, "uprofile", "sigma-averaged Lyapunov exponent U(t) of a certified strip", common,
                      [this] { return uprofile(); }, runners);
    a->add_option("--family", family, "family JSON")->required();
    a->add_option("--levels", levels, "levels t (default 0.02 0.04 0.06 0.08 0.10)");
    a->add_option("--sigmas", sigmas, "sigma nodes")->capture_default_str();
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 512)");
    a->add_option("--max-residual", max_residual, "check on the relative residual of the affine fit");
    strip.add(a);
  }

  Outcome uprofile() {
    const Family f = load_family(family);
    const StripCocycle s = strip.build(f, 64);
    const std::vector<double> ts = levels.empty() ? std::vector<double>{0.02, 0.04, 0.06, 0.08, 0.10} : levels;
    const UProfile u = u_profile(s, ts, uniform_nodes(sigmas), xgrid(f.alpha(), x_nodes > 0 ? x_nodes : 512));
    Outcome out;
    Table tab({"t", "U", "U_q", "epsilon_hat", "min_section_L"});
    for (std::size_t i = 0; i < u.levels.size(); ++i)
      tab.row() << u.levels[i] << u.u[i] << u.u_q[i] << u.epsilon_hat[i] << u.min_section_l[i];
    out.results = {{"slope", u.fit.slope}, {"intercept", u.fit.intercept}, {"relative_residual", u.relative_residual},
                   {"max_section_residual", u.max_residual}, {"side", side_name(s.side)}};
    if (std::isfinite(max_residual)) out.report.check("relative_residual", u.relative_residual, "<=", max_residual);
    out.csv = tab.str();
    return out;
  }

  void add_d2l() {
    auto* a = command(app, "d2l", "second-derivative limit of the exponent of exp(t s)", common,
                      [this] { return d2l(); }, runners);
    a->add_option("--s1", s1, "trig polynomial JSON for the diagonal part")->capture_default_str();
    a->add_option("--s2", s2, "symmetric off-diagonal part")->capture_default_str();
    a->add_option("--s3", s3, "antisymmetric (rotation) part")->capture_default_str();
    a->add_option("--levels", levels, "levels t (default 0.05 0.025)");
    a->add_option("--theta-nodes", theta_nodes, "quadrature nodes")->capture_default_str();
    a->add_option("--expect", expect, "expected limit, checked with --rtol");
    a->add_option("--rtol", rtol, "relative tolerance for --expect")->capture_default_str();
  }

  Outcome d2l() {
    const auto poly = [](const std::string& s, const char* name) { return trig_poly_from_json(document(s, name), 1); };
    const std::vector<double> ts = levels.empty() ? std::vector<double>{0.05, 0.025} : levels;
    const SecondDerivative d = second_derivative_limit(poly(s1, "s1"), poly(s2, "s2"), poly(s3, "s3"), ts, theta_nodes);
    Outcome out;
    Table tab({"t", "value"});
    for (std::size_t i = 0; i < d.levels.size(); ++i) tab.row() << d.levels[i] << d.values[i];
    out.results = {{"richardson", d.richardson}};
    if (!std::isnan(expect)) {
      const double err = expect == 0.0 ? std::abs(d.richardson) : std::abs(d.richardson - expect) / std::abs(expect);
      out.report.check(expect == 0.0 ? "abs_error" : "relative_error", err, "<=", rtol);
    }
    out.csv = tab.str();
    return out;
  }

  void add_kotani() {
    auto* a = command(app, "kotani", "Kotani integrals I+, I- and D^2 across strip levels", common,
                      [this] { return kotani(); }, runners);
    a->add_option("--family", family, "family JSON")->required();
    a->add_option("--sigma", sigma, "real part of theta")->capture_default_str();
    a->add_option("--levels", levels, "levels t (default 0.1 0.05 0.025 0.0125)");
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 1024)");
    strip.add(a);
  }

  Outcome kotani() {
    const Family f = load_family(family);
    const StripCocycle s = strip.build(f, 64);
    const std::vector<double> ts = levels.empty() ? std::vector<double>{0.1, 0.05, 0.025, 0.0125} : levels;
    const auto probes = kotani_profile(s, sigma, ts, xgrid(f.alpha(), x_nodes > 0 ? x_nodes : 1024));
    Outcome out;
    Table tab({"t", "I_plus", "I_minus", "D2", "residual_plus", "residual_minus"});
    for (const auto& p : probes)
      tab.row() << p.t << p.values.i_plus << p.values.i_minus << p.values.d2 << p.residual_plus << p.residual_minus;
    out.results = {{"side", side_name(s.side)}, {"levels", ts.size()}};
    out.csv = tab.str();
    return out;
  }

  void add_barycenter() {
    auto* a = command(app, "barycenter", "conformal barycenter of a finite measure on the disk", common,
                      [this] { return barycenter(); }, runners);
    add_barycenter_options(a);
  }

  void add_barycenter_options(CLI::App* a) {
    a->add_option("--atoms", atoms, "text file of atoms: re im weight per line, # comments")->required();
    a->add_option("--tol", tol, "hyperbolic stopping tolerance")->capture_default_str();
    a->add_flag("--exact", exact, "exact pairing (no compaction; fails above the hard atom cap)");
    a->add_option("--cap", cap, "working atom cap of the lossy mode")->capture_default_str();
  }

  Outcome barycenter() {
    std::ifstream in(atoms);
    if (!in) usage("cannot open '" + atoms + "'");
    std::vector<DiskAtom> list;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream s(line);
      double re, im, w;
      if (!(s >> re)) continue;
      if (!(s >> im >> w)) usage(atoms + ":" + std::to_string(lineno) + ": expected 're im weight'");
      list.push_back({Complex(re, im), w});
    }
    BarycenterOptions opt;
    opt.tol = tol;
    opt.lossy = !exact;
    opt.cap = static_cast<std::size_t>(cap);
    const BarycenterResult r = conformal_barycenter(DiskMeasure::normalized(list), opt);
    Outcome out;
    Table tab({"iteration", "phi", "atoms"});
    for (std::size_t k = 0; k < r.phi_trace.size(); ++k)
      tab.row() << static_cast<long>(k) << r.phi_trace[k]
                << static_cast<long>(k < r.atom_counts.size() ? r.atom_counts[k] : 0);
    out.results = {{"re", r.point.real()}, {"im", r.point.imag()}, {"iterations", r.iterations},
                   {"diameter", r.diameter}, {"variance", r.variance}, {"phi_monotone", r.phi_monotone}};
    out.report.check("phi_monotone", r.phi_monotone ? 1.0 : 0.0, ">=", 1.0);
    out.csv = tab.str();
    return out;
  }

  void add_renorm() {
    auto* a = command(app, "renorm", "renormalization cascade and distance to the rotation model", common,
                      [this] { return renorm(); }, runners);
    a->add_option("--cocycle", cocycle, "cocycle JSON (one frequency)")->required();
    a->add_option("--depth", depth, "levels n = 1..depth")->capture_default_str();
    a->add_option("--x-star", x_star, "base point of the return maps")->capture_default_str();
    a->add_option("--nodes", rep_nodes, "representative samples")->capture_default_str();
  }

  Outcome renorm() {
    const Cocycle c = load_cocycle(cocycle);
    const auto levels_out = renorm_cascade(c, depth, x_star, rep_nodes);
    Outcome out;
    Table tab({"n", "alpha_n", "commutation", "normalizing", "periodicity", "degree", "rotation_defect", "theta_hat",
               "distance"});
    for (const auto& l : levels_out)
      tab.row() << l.n << l.alpha_n << l.commutation_residual << l.normalizing_residual << l.periodicity_residual
                << l.degree << l.rotation_defect << l.theta_hat << l.distance;
    double comm = 0.0;
    for (const auto& l : levels_out) comm = std::max(comm, l.commutation_residual);
    out.results = {{"levels", levels_out.size()}, {"last_distance", levels_out.empty() ? 0.0 : levels_out.back().distance}};
    out.report.check("commutation_residual", comm, "<=", kCommutationTol);
    out.csv = tab.str();
    return out;
  }

  void add_conjugate() {
    auto* a = command(app, "conjugate", "conjugacies to rotations: l2-from-section, cohomological, push-to-model",
                      common, [this] { return conjugate(); }, runners);
    a->add_option("--mode", mode, "l2-from-section, cohomological or push-to-model")->capture_default_str();
    a->add_option("--cocycle", cocycle, "cocycle JSON (l2-from-section, push-to-model)");
    a->add_option("--section", section_file, "section CSV from the section subcommand (l2-from-section)");
    a->add_option("--t", t, "level of the RotTwist section when --section is absent")->capture_default_str();
    a->add_option("--x-nodes", x_nodes, "x grid nodes (default 256)");
    a->add_option("--phi", phi, "trig polynomial JSON (cohomological)");
    a->add_option("--alpha", alpha_text, "frequencies: numbers, golden or silver (cohomological)");
    a->add_option("--divisor-cut", divisor_cut, "small divisor cut")->capture_default_str();
    a->add_option("--stages", stages, "push-to-model stages")->capture_default_str();
    a->add_option("--tol", section_tol, "check on the cohomological or section residual")->capture_default_str();
  }

  Outcome conjugate() {
    if (mode == "cohomological") return cohomological();
    if (mode == "push-to-model") return push();
    if (mode == "l2-from-section") return l2_from_section();
    usage("--mode must be l2-from-section, cohomological or push-to-model");
  }

  Outcome cohomological() {
    if (alpha_text.empty()) usage("cohomological mode needs --alpha");
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(alpha_text.size()));
    for (std::size_t i = 0; i < alpha_text.size(); ++i) alpha[static_cast<Eigen::Index>(i)] = parse_frequency(Json(alpha_text[i]));
    const TrigPoly p = trig_poly_from_json(document(phi, "phi"), static_cast<int>(alpha.size()));
    Outcome out;
    CohomologicalSolution sol;
    try {
      sol = solve_cohomological(p, alpha, divisor_cut);
    } catch (const Error& e) {
      if (e.code() != Errc::SmallDivisor) throw;
      const auto d = static_cast<std::size_t>(alpha.size());
      Table tab({"resonant_mode"});
      Json modes = Json::array();
      for (std::size_t i = 0; i + d <= e.detail().size(); i += d) {
        std::string k;
        for (std::size_t j = 0; j < d; ++j) k += (j ? " " : "") + std::to_string(e.detail()[i + j]);
        tab.row() << k;
        modes.push_back(std::vector<long>(e.detail().begin() + static_cast<long>(i), e.detail().begin() + static_cast<long>(i + d)));
      }
      out.results = {{"small_divisor", modes}};
      out.report.check("small_divisor_modes", static_cast<double>(modes.size()), "<=", 0.0);
      out.csv = tab.str();
      return out;
    }
    std::vector<std::string> cols;
    for (Eigen::Index j = 0; j < alpha.size(); ++j) cols.push_back("k" + std::to_string(j + 1));
    cols.emplace_back("re");
    cols.emplace_back("im");
    Table tab(cols);
    for (const auto& [k, c] : sol.psi.modes()) {
      tab.row();
      for (int kj : k) tab << kj;
      tab << c.real() << c.imag();
    }
    out.results = {{"c", sol.c}, {"residual", sol.residual}};
    out.report.check("residual", sol.residual, "<=", std::min(section_tol, kCohomologicalTol));
    out.csv = tab.str();
    return out;
  }

  Outcome push() {
    const Cocycle c = load_cocycle(cocycle);
    PushOptions opt;
    opt.stages = stages;
    opt.divisor_cut = divisor_cut;
    const auto st = push_to_model(c, opt);
    Outcome out;
    Table tab({"stage", "max_mode", "l", "lattice_error", "cohomological_residual", "distance"});
    long increases = 0;
    for (std::size_t s = 0; s < st.size(); ++s) {
      std::string l;
      for (std::size_t j = 0; j < st[s].l.size(); ++j) l += (j ? " " : "") + std::to_string(st[s].l[j]);
      tab.row() << st[s].stage << st[s].max_mode << l << st[s].lattice_error << st[s].cohomological_residual
                << st[s].distance;
      if (s > 0 && st[s].distance > st[s - 1].distance) ++increases;
    }
    out.results = {{"stages", st.size() - 1}, {"final_distance", st.back().distance}};
    out.report.check("distance_increases", static_cast<double>(increases), "<=", 0.0);
    out.csv = tab.str();
    return out;
  }

  /// Section values from a CSV written by the section subcommand.
  std::vector<Complex> read_section(int dim, const TorusGrid& g) const {
    std::ifstream in(section_file);
    if (!in) usage("cannot open '" + section_file + "'");
    std::string line;
    std::getline(in, line);
    std::vector<Complex> m;
    while (std::getline(in, line)) {
      std::vector<double> v;
      std::stringstream s(line);
      std::string cell;
      while (std::getline(s, cell, ',')) v.push_back(std::stod(cell));
      if (static_cast<int>(v.size()) != dim + 3) usage("section CSV row has the wrong width");
      const std::size_t i = m.size();
      if (i >= g.size()) usage("section CSV has more rows than --x-nodes");
      for (int j = 0; j < dim; ++j)
        if (std::abs(v[static_cast<std::size_t>(j)] - g.points[i][j]) > 1e-12) usage("section CSV grid differs from --x-nodes");
      m.emplace_back(v[static_cast<std::size_t>(dim)], v[static_cast<std::size_t>(dim) + 1]);
    }
    if (m.size() != g.size()) usage("section CSV has fewer rows than --x-nodes");
    return m;
  }

  Outcome l2_from_section() {
    const Cocycle c = load_cocycle(cocycle);
    const TorusGrid g = xgrid(c.alpha, x_nodes > 0 ? x_nodes : 256);
    std::vector<Complex> m;
    if (!section_file.empty()) {
      m = read_section(c.dim(), g);
    } else {
      const StripCocycle s = strip.build(Family::rot_twist(c), 64);
      m = invariant_section(s, 0.0, t, s.side, g).values;
    }
    const L2Conjugacy r = l2_conjugacy_from_section(c, g, m);
    Outcome out;
    Table tab({"x", "b11", "b12", "b21", "b22"});
    for (std::size_t i = 0; i < r.field.values.size(); ++i) {
      const Mat2R& b = r.field.values[i];
      tab.row() << g.points[i][0] << b(0, 0) << b(0, 1) << b(1, 0) << b(1, 1);
    }
    out.results = {{"quality", r.field.quality}, {"section_residual", r.section_residual}, {"verified", r.verified}};
    out.report.check("quality_vs_residual", r.verified ? 1.0 : 0.0, ">=", 1.0);
    out.csv = tab.str();
    return out;
  }

  void add_suite() {
    auto* a = command(app, "suite", "acceptance bundles: identities, kotani, renorm-cascade, monotone-audit, ...",
                      common, [this] { return suite(); }, runners);
    a->add_option("name", suite_name, "bundle name or criterion id (A1..A13)")->required();
    a->add_option("--seed", seed, "seed of the randomized suites")->capture_default_str();
    a->add_option("--barycenter-maps", barycenter_maps, "random maps in the barycenter suite")->capture_default_str();
  }

  Outcome suite() {
    SuiteOptions opt;
    opt.seed = seed;
    opt.barycenter_maps = barycenter_maps;
    Outcome out;
    std::vector<CriterionReport> reports;
    Json criteria = Json::array();
    for (const auto& id : suite_members(suite_name)) {
      reports.push_back(run_criterion(id, opt));
      std::cerr << summary_line(reports.back()) << '\n';
      criteria.push_back(to_json(reports.back()));
      out.report.check(id, reports.back().pass() ? 1.0 : 0.0, ">=", 1.0);
    }
    out.results = {{"criteria", criteria}};
    out.csv = details_csv(reports);
    return out;
  }

  void add_run() {
    CLI::App* run = app.add_subcommand("run", "named experiments");
    run->require_subcommand(1);
    auto* h = command(*run, "herman-average", "theta-average of L for herman(lambda, (1)) against its closed form",
                      common, [this] { return herman_average(); }, runners);
    h->add_option("--lambda", lambda)->capture_default_str();
    h->add_option("--alpha", alpha_name, "golden, silver or a number")->capture_default_str();
    h->add_option("--theta-points", theta_points, "theta points")->capture_default_str();
    h->add_option("--N", n, "iterates per theta")->capture_default_str();
    h->add_option("--rtol", rtol, "relative tolerance")->capture_default_str();
    auto* b = command(*run, "barycenter", "conformal barycenter with its Phi trace", common,
                      [this] { return barycenter(); }, runners);
    add_barycenter_options(b);
  }

  Outcome herman_average() {
    if (lambda < 1.0) usage("--lambda must be >= 1");
    const Cocycle c(Eigen::VectorXd::Constant(1, parse_frequency(Json(alpha_name))), herman(lambda, {1}));
    const int k = theta_points > 0 ? theta_points : 64;
    const double avg = lyapunov_theta_average(c, k, n, Eigen::VectorXd::Zero(1));
    // Closed form of the average: ln((lambda + 1/lambda) / 2).
    const double target = std::log((lambda + 1.0 / lambda) / 2.0);
    Outcome out;
    Table tab({"lambda", "theta_points", "N", "theta_average", "closed_form"});
    tab.row() << lambda << k << n << avg << target;
    out.results = {{"theta_average", avg}, {"closed_form", target}};
    if (target > 0.0) out.report.check("relative_error", std::abs(avg - target) / target, "<=", rtol);
    out.csv = tab.str();
    return out;
  }
};

}  // namespace
}  // namespace sl2lab::cli

int main(int argc, char** argv) {
  using namespace sl2lab;
  cli::Cli c;
  try {
    c.app.parse(argc, argv);
  } catch (const CLI::ConfigError& e) {
    std::cerr << "sl2lab: config entry not accepted: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = c.app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "sl2lab: " << e.what() << '\n';
    return 2;
  }
  if (c.workers > 0) setenv(kWorkersEnv, std::to_string(c.workers).c_str(), 1);
  for (auto& run : c.runners) {
    try {
      run();
    } catch (const Error& e) {
      std::cerr << "sl2lab: " << e.what() << '\n';
      return e.code() == Errc::ConfigError || e.code() == Errc::InvalidArgument ? 2 : 1;
    } catch (const CLI::Error& e) {
      std::cerr << "sl2lab: " << e.what() << '\n';
      return 2;
    }
  }
  return 0;
}
