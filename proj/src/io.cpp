#include "sl2lab/io.hpp"

#include <fstream>
#include <sstream>

namespace sl2lab {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) config_error(std::string("missing field '") + name + "'");
  return j.at(name);
}

double number(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) config_error(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::vector<int> int_list(const Json& v, const char* name) {
  if (!v.is_array()) config_error(std::string("field '") + name + "' must be an integer list");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) config_error(std::string("field '") + name + "' must contain integers");
    out.push_back(e.get<int>());
  }
  return out;
}

Eigen::VectorXd real_vector(const Json& v, const char* name) {
  if (!v.is_array()) config_error(std::string("field '") + name + "' must be a list");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) config_error(std::string("field '") + name + "' must contain numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd frequency_vector(const Json& j) {
  if (j.is_array()) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) out[static_cast<Eigen::Index>(i)] = parse_frequency(j[i]);
    return out;
  }
  Eigen::VectorXd out(1);
  out[0] = parse_frequency(j);
  return out;
}

void add_shorthand_terms(TrigPoly& p, const Json& j, const char* name, bool cosine, int dim) {
  if (!j.contains(name)) return;
  for (const auto& t : j.at(name)) {
    const Mode k = int_list(field(t, "k"), "k");
    if (static_cast<int>(k.size()) != dim) config_error("shorthand mode has the wrong dimension");
    const double amp = number(t, "amplitude");
    const double phase = t.contains("phase") ? number(t, "phase") : 0.0;
    p += cosine ? TrigPoly::cosine(k, amp, phase) : TrigPoly::sine(k, amp, phase);
  }
}

}  // namespace

double periodic_continued_fraction(const std::vector<int>& period) {
  if (period.empty()) config_error("partial quotient list is empty");
  for (int a : period)
    if (a < 1) config_error("partial quotients must be positive");
  // [0; a1, a2, ...] with the period repeated until the value is stationary.
  double x = 0.0;
  for (int rep = 0; rep < 200; ++rep)
    for (auto it = period.rbegin(); it != period.rend(); ++it) x = 1.0 / (*it + x);
  return x;
}

double parse_frequency(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "golden") return kGoldenMean;
    if (s == "silver") return kSilverMean;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    config_error("unknown frequency '" + s + "'");
  }
  if (j.is_object() && j.contains("partial_quotients"))
    return periodic_continued_fraction(int_list(j.at("partial_quotients"), "partial_quotients"));
  config_error("frequency must be a number, 'golden', 'silver' or {partial_quotients}");
}

Json to_json(const TrigPoly& p) {
  Json modes = Json::array();
  for (const auto& [k, c] : p.modes()) modes.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
  Json out = {{"dim", p.dim()}, {"modes", modes}};
  if (p.has_linear_part()) out["slope"] = vector_json(p.slope());
  return out;
}

TrigPoly trig_poly_from_json(const Json& j, int dim) {
  if (j.is_number()) return TrigPoly::constant(dim, j.get<double>());
  if (!j.is_object()) config_error("trigonometric polynomial must be a number or an object");
  if (j.contains("dim") && j.at("dim").get<int>() != dim) config_error("polynomial dimension does not match the cocycle");
  TrigPoly p(dim);
  if (j.contains("modes")) {
    for (const auto& m : j.at("modes")) {
      const Mode k = int_list(field(m, "k"), "k");
      if (static_cast<int>(k.size()) != dim) config_error("mode has the wrong dimension");
      const double re = m.contains("re") ? number(m, "re") : 0.0;
      const double im = m.contains("im") ? number(m, "im") : 0.0;
      p.add(k, Complex(re, im));
    }
  }
  if (j.contains("slope")) {
    const Eigen::VectorXd s = real_vector(j.at("slope"), "slope");
    if (s.size() != dim) config_error("slope has the wrong dimension");
    p.set_slope(s);
  }
  if (j.contains("constant")) p.add(Mode(static_cast<std::size_t>(dim), 0), number(j, "constant"));
  add_shorthand_terms(p, j, "cos", true, dim);
  add_shorthand_terms(p, j, "sin", false, dim);
  return p;
}

Json to_json(const CocycleExpr& e) {
  using Kind = CocycleExpr::Kind;
  switch (e.kind()) {
    case Kind::Rot: return {{"node", "Rot"}, {"phi", to_json(e.polys()[0])}};
    case Kind::DiagExp: return {{"node", "DiagExp"}, {"p", to_json(e.polys()[0])}};
    case Kind::ShearU: return {{"node", "ShearU"}, {"q", to_json(e.polys()[0])}};
    case Kind::ShearL: return {{"node", "ShearL"}, {"q", to_json(e.polys()[0])}};
    case Kind::Const: {
      const Mat2R& m = e.matrix();
      return {{"node", "Const"}, {"matrix", {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}}};
    }
    case Kind::ExpSl2:
      return {{"node", "ExpSl2"},
              {"s1", to_json(e.polys()[0])},
              {"s2", to_json(e.polys()[1])},
              {"s3", to_json(e.polys()[2])},
              {"t", e.scale()}};
    case Kind::Product: {
      Json children = Json::array();
      for (const auto& c : e.children()) children.push_back(to_json(c));
      return {{"node", "Product"}, {"children", children}};
    }
    case Kind::Shift: return {{"node", "Shift"}, {"offset", vector_json(e.offset())}, {"child", to_json(e.children()[0])}};
  }
  return {};
}

CocycleExpr expr_from_json(const Json& j, int dim) {
  if (!j.is_object()) config_error("expression must be an object");
  if (j.contains("builder")) {
    const std::string b = field(j, "builder").get<std::string>();
    if (b == "rotation_model") {
      const auto l = int_list(field(j, "l"), "l");
      if (static_cast<int>(l.size()) != dim) config_error("rotation_model l has the wrong dimension");
      return rotation_model(l);
    }
    if (b == "herman") {
      const auto l = int_list(field(j, "l"), "l");
      if (static_cast<int>(l.size()) != dim) config_error("herman l has the wrong dimension");
      return herman(number(j, "lambda"), l);
    }
    if (b == "schrodinger")
      return schrodinger(trig_poly_from_json(field(j, "v"), dim), number(j, "energy"));
    if (b == "exp_family")
      return exp_family(trig_poly_from_json(field(j, "s1"), dim), trig_poly_from_json(field(j, "s2"), dim),
                        trig_poly_from_json(field(j, "s3"), dim), number(j, "t"));
    if (b == "identity") return CocycleExpr::constant(Mat2R::Identity(), dim);
    config_error("unknown builder '" + b + "'");
  }
  const std::string n = field(j, "node").get<std::string>();
  if (n == "Rot") return CocycleExpr::rot(trig_poly_from_json(field(j, "phi"), dim));
  if (n == "DiagExp") return CocycleExpr::diag_exp(trig_poly_from_json(field(j, "p"), dim));
  if (n == "ShearU") return CocycleExpr::shear_upper(trig_poly_from_json(field(j, "q"), dim));
  if (n == "ShearL") return CocycleExpr::shear_lower(trig_poly_from_json(field(j, "q"), dim));
  if (n == "Const") {
    const Json& m = field(j, "matrix");
    if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2) config_error("Const matrix must be 2x2");
    Mat2R a;
    a << m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(), m[1][1].get<double>();
    return CocycleExpr::constant(a, dim);
  }
  if (n == "ExpSl2")
    return CocycleExpr::exp_sl2(trig_poly_from_json(field(j, "s1"), dim), trig_poly_from_json(field(j, "s2"), dim),
                                trig_poly_from_json(field(j, "s3"), dim), number(j, "t"));
  if (n == "Product") {
    std::vector<CocycleExpr> children;
    for (const auto& c : field(j, "children")) children.push_back(expr_from_json(c, dim));
    return CocycleExpr::product(std::move(children));
  }
  if (n == "Shift") {
    const Eigen::VectorXd o = real_vector(field(j, "offset"), "offset");
    if (o.size() != dim) config_error("Shift offset has the wrong dimension");
    return CocycleExpr::shift(o, expr_from_json(field(j, "child"), dim));
  }
  config_error("unknown node kind '" + n + "'");
}

Json to_json(const Cocycle& c) {
  return {{"dimension", c.dim()}, {"alpha", vector_json(c.alpha)}, {"expr", to_json(c.expr)}};
}

Cocycle cocycle_from_json(const Json& j) {
  try {
    const Eigen::VectorXd alpha = frequency_vector(field(j, "alpha"));
    const int dim = j.contains("dimension") ? j.at("dimension").get<int>() : static_cast<int>(alpha.size());
    if (dim != alpha.size()) config_error("alpha has the wrong dimension");
    return Cocycle(alpha, expr_from_json(field(j, "expr"), dim));
  } catch (const Json::exception& e) {
    config_error(std::string("malformed cocycle: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    config_error(e.what());
  }
}

Json to_json(const Family& f) {
  switch (f.kind()) {
    case Family::Kind::PhaseShift:
      return {{"kind", "PhaseShift"}, {"w", vector_json(f.w())}, {"base", to_json(Cocycle(f.alpha(), f.expr()))}};
    case Family::Kind::RotTwist: return {{"kind", "RotTwist"}, {"base", to_json(Cocycle(f.alpha(), f.expr()))}};
    case Family::Kind::General:
      return {{"kind", "General"},
              {"alpha", vector_json(f.alpha())},
              {"param_index", f.param_index()},
              {"expr", to_json(f.expr())}};
  }
  return {};
}

Family family_from_json(const Json& j) {
  try {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "PhaseShift") {
      Cocycle base = cocycle_from_json(field(j, "base"));
      const Eigen::VectorXd w = real_vector(field(j, "w"), "w");
      if (w.size() != base.dim()) config_error("w has the wrong dimension");
      return Family::phase_shift(std::move(base), w);
    }
    if (kind == "RotTwist") return Family::rot_twist(cocycle_from_json(field(j, "base")));
    if (kind == "General") {
      const Eigen::VectorXd alpha = frequency_vector(field(j, "alpha"));
      const int p = field(j, "param_index").get<int>();
      return Family::general(alpha, expr_from_json(field(j, "expr"), static_cast<int>(alpha.size()) + 1), p);
    }
    if (kind == "SchrodingerEnergy") {
      const Eigen::VectorXd alpha = frequency_vector(field(j, "alpha"));
      return schrodinger_energy_family(trig_poly_from_json(field(j, "v"), static_cast<int>(alpha.size())), alpha);
    }
    config_error("unknown family kind '" + kind + "'");
  } catch (const Json::exception& e) {
    config_error(std::string("malformed family: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    config_error(e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    config_error("cannot parse '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) config_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace sl2lab
