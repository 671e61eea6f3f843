#include "sl2lab/cocycle.hpp"

#include <algorithm>
#include <cmath>

namespace sl2lab {

struct CocycleExpr::Node {
  Kind kind;
  int dim;
  std::vector<TrigPoly> polys;
  Mat2R matrix = Mat2R::Identity();
  double scale = 0.0;
  Eigen::VectorXd offset;
  std::vector<CocycleExpr> children;
};

namespace {

constexpr double kExpLimit = 690.0;

template <typename S>
using VecS = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
S scalar_from(const Complex& z) {
  if constexpr (std::is_same_v<S, double>)
    return z.real();
  else
    return z;
}

template <typename S>
S poly_value(const TrigPoly& p, const VecS<S>& x) {
  return scalar_from<S>(p(x));
}

template <typename S>
std::pair<S, S> poly_jet(const TrigPoly& p, const VecS<S>& x, const Eigen::VectorXd& v) {
  const auto [val, der] = p.jet(VecS<Complex>(x.template cast<Complex>()), v);
  return {scalar_from<S>(val), scalar_from<S>(der)};
}

void check_exponent(double re) {
  if (std::abs(re) > kExpLimit) throw Error(Errc::Overflow, "evaluation point too far from the real torus");
}

template <typename S>
Mat2<S> rot_checked(const S& phi) {
  if constexpr (!std::is_same_v<S, double>) check_exponent(kTwoPi * phi.imag());
  return rotation(phi);
}

/// d/dphi R_phi
template <typename S>
Mat2<S> rot_derivative(const S& phi) {
  Mat2<S> r = rotation(phi);
  Mat2<S> d;
  d << -r(1, 0), -r(0, 0), r(0, 0), -r(1, 0);
  return S(kTwoPi) * d;
}

// cosh(sqrt u), sinh(sqrt u)/sqrt u and the derivative of the latter, entire in u.
struct CoshSinh {
  Complex c, sh, dsh;
};

CoshSinh cosh_sinh(Complex u) {
  CoshSinh out;
  if (std::abs(u) < 0.1) {
    // Taylor series; 10 terms reach full double precision for |u| < 0.1.
    Complex c(0.0), sh(0.0), dsh(0.0);
    Complex upow(1.0);
    double fact_even = 1.0, fact_odd = 1.0;  // (2k)!, (2k+1)!
    for (int k = 0; k < 12; ++k) {
      if (k > 0) {
        fact_even *= (2.0 * k - 1.0) * (2.0 * k);
        fact_odd *= (2.0 * k) * (2.0 * k + 1.0);
      }
      c += upow / fact_even;
      sh += upow / fact_odd;
      if (k + 1 < 12) dsh += static_cast<double>(k + 1) * upow / (fact_odd * (2.0 * k + 2.0) * (2.0 * k + 3.0));
      upow *= u;
    }
    out.c = c;
    out.sh = sh;
    out.dsh = dsh;
    return out;
  }
  const Complex r = std::sqrt(u);
  check_exponent(r.real());
  out.c = std::cosh(r);
  out.sh = std::sinh(r) / r;
  out.dsh = (out.c - out.sh) / (2.0 * u);
  return out;
}

template <typename S>
Mat2<S> sl2_generator(const S& s1, const S& s2, const S& s3) {
  Mat2<S> m;
  m << s1, s2 + s3, s2 - s3, -s1;
  return m;
}

template <typename S>
Mat2<S> node_eval(const CocycleExpr& e, const VecS<S>& x) {
  using Kind = CocycleExpr::Kind;
  switch (e.kind()) {
    case Kind::Rot:
      return rot_checked<S>(poly_value<S>(e.polys()[0], x));
    case Kind::DiagExp: {
      const S p = poly_value<S>(e.polys()[0], x);
      check_exponent(std::real(p));
      Mat2<S> m = Mat2<S>::Zero();
      m(0, 0) = std::exp(p);
      m(1, 1) = std::exp(-p);
      return m;
    }
    case Kind::ShearU: {
      Mat2<S> m = Mat2<S>::Identity();
      m(0, 1) = poly_value<S>(e.polys()[0], x);
      return m;
    }
    case Kind::ShearL: {
      Mat2<S> m = Mat2<S>::Identity();
      m(1, 0) = poly_value<S>(e.polys()[0], x);
      return m;
    }
    case Kind::Const:
      return e.matrix().cast<S>();
    case Kind::ExpSl2: {
      const S s1 = poly_value<S>(e.polys()[0], x);
      const S s2 = poly_value<S>(e.polys()[1], x);
      const S s3 = poly_value<S>(e.polys()[2], x);
      const double t = e.scale();
      const CoshSinh cs = cosh_sinh(Complex(t * t) * Complex(s1 * s1 + s2 * s2 - s3 * s3));
      return Mat2<S>(scalar_from<S>(cs.c) * Mat2<S>::Identity() +
                     S(t) * scalar_from<S>(cs.sh) * sl2_generator<S>(s1, s2, s3));
    }
    case Kind::Product: {
      Mat2<S> m = Mat2<S>::Identity();
      for (const auto& child : e.children()) m = m * node_eval<S>(child, x);
      return m;
    }
    case Kind::Shift:
      return node_eval<S>(e.children()[0], VecS<S>(x + e.offset().template cast<S>()));
  }
  return Mat2<S>::Identity();
}

template <typename S>
std::pair<Mat2<S>, Mat2<S>> node_jet(const CocycleExpr& e, const VecS<S>& x, const Eigen::VectorXd& v) {
  using Kind = CocycleExpr::Kind;
  switch (e.kind()) {
    case Kind::Rot: {
      const auto [phi, dphi] = poly_jet<S>(e.polys()[0], x, v);
      return {rot_checked<S>(phi), Mat2<S>(dphi * rot_derivative<S>(phi))};
    }
    case Kind::DiagExp: {
      const auto [p, dp] = poly_jet<S>(e.polys()[0], x, v);
      check_exponent(std::real(p));
      Mat2<S> m = Mat2<S>::Zero(), d = Mat2<S>::Zero();
      m(0, 0) = std::exp(p);
      m(1, 1) = std::exp(-p);
      d(0, 0) = dp * m(0, 0);
      d(1, 1) = -dp * m(1, 1);
      return {m, d};
    }
    case Kind::ShearU:
    case Kind::ShearL: {
      const auto [q, dq] = poly_jet<S>(e.polys()[0], x, v);
      Mat2<S> m = Mat2<S>::Identity(), d = Mat2<S>::Zero();
      const int r = e.kind() == Kind::ShearU ? 0 : 1;
      m(r, 1 - r) = q;
      d(r, 1 - r) = dq;
      return {m, d};
    }
    case Kind::Const:
      return {e.matrix().cast<S>(), Mat2<S>::Zero()};
    case Kind::ExpSl2: {
      const auto [s1, d1] = poly_jet<S>(e.polys()[0], x, v);
      const auto [s2, d2] = poly_jet<S>(e.polys()[1], x, v);
      const auto [s3, d3] = poly_jet<S>(e.polys()[2], x, v);
      const double t = e.scale();
      const CoshSinh cs = cosh_sinh(Complex(t * t) * Complex(s1 * s1 + s2 * s2 - s3 * s3));
      const S du = S(2.0 * t * t) * (s1 * d1 + s2 * d2 - s3 * d3);
      const Mat2<S> gen = sl2_generator<S>(s1, s2, s3);
      const Mat2<S> dgen = sl2_generator<S>(d1, d2, d3);
      const S sh = scalar_from<S>(cs.sh);
      const S dsh = scalar_from<S>(cs.dsh);
      Mat2<S> m = scalar_from<S>(cs.c) * Mat2<S>::Identity() + S(t) * sh * gen;
      Mat2<S> d = (S(0.5) * sh * du) * Mat2<S>::Identity() + S(t) * dsh * du * gen + S(t) * sh * dgen;
      return {m, d};
    }
    case Kind::Product: {
      Mat2<S> m = Mat2<S>::Identity(), d = Mat2<S>::Zero();
      for (const auto& child : e.children()) {
        const auto [cm, cd] = node_jet<S>(child, x, v);
        d = d * cm + m * cd;
        m = m * cm;
      }
      return {m, d};
    }
    case Kind::Shift:
      return node_jet<S>(e.children()[0], VecS<S>(x + e.offset().template cast<S>()), v);
  }
  return {Mat2<S>::Identity(), Mat2<S>::Zero()};
}

void require_dim(const TrigPoly& p, int dim) {
  if (p.dim() != dim) throw Error(Errc::InvalidArgument, "expression leaves must share the torus dimension");
}

}  // namespace

CocycleExpr CocycleExpr::rot(TrigPoly phi) {
  const int d = phi.dim();
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::Rot, d, {std::move(phi)}, Mat2R::Identity(), 0.0, {}, {}}));
}

CocycleExpr CocycleExpr::diag_exp(TrigPoly p) {
  const int d = p.dim();
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::DiagExp, d, {std::move(p)}, Mat2R::Identity(), 0.0, {}, {}}));
}

CocycleExpr CocycleExpr::shear_upper(TrigPoly q) {
  const int d = q.dim();
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::ShearU, d, {std::move(q)}, Mat2R::Identity(), 0.0, {}, {}}));
}

CocycleExpr CocycleExpr::shear_lower(TrigPoly q) {
  const int d = q.dim();
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::ShearL, d, {std::move(q)}, Mat2R::Identity(), 0.0, {}, {}}));
}

CocycleExpr CocycleExpr::constant(const Mat2R& m, int dim) {
  if (dim < 1) throw Error(Errc::InvalidArgument, "constant node needs dimension >= 1");
  if (!m.allFinite() || std::abs(m.determinant() - 1.0) > 1e-9)
    throw Error(Errc::InvalidArgument, "constant node must be a finite unimodular matrix");
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::Const, dim, {}, m, 0.0, {}, {}}));
}

CocycleExpr CocycleExpr::exp_sl2(TrigPoly s1, TrigPoly s2, TrigPoly s3, double t) {
  const int d = s1.dim();
  require_dim(s2, d);
  require_dim(s3, d);
  if (!std::isfinite(t)) throw Error(Errc::InvalidArgument, "exp_sl2 scale must be finite");
  return CocycleExpr(std::make_shared<const Node>(
      Node{Kind::ExpSl2, d, {std::move(s1), std::move(s2), std::move(s3)}, Mat2R::Identity(), t, {}, {}}));
}

CocycleExpr CocycleExpr::product(std::vector<CocycleExpr> children) {
  if (children.empty()) throw Error(Errc::InvalidArgument, "product needs at least one factor");
  const int d = children.front().dim();
  for (const auto& c : children)
    if (c.dim() != d) throw Error(Errc::InvalidArgument, "product factors must share the torus dimension");
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::Product, d, {}, Mat2R::Identity(), 0.0, {}, std::move(children)}));
}

CocycleExpr CocycleExpr::shift(const Eigen::VectorXd& offset, CocycleExpr child) {
  if (offset.size() != child.dim()) throw Error(Errc::InvalidArgument, "shift offset dimension mismatch");
  if (!offset.allFinite()) throw Error(Errc::InvalidArgument, "shift offset must be finite");
  const int d = child.dim();
  return CocycleExpr(std::make_shared<const Node>(Node{Kind::Shift, d, {}, Mat2R::Identity(), 0.0, offset, {std::move(child)}}));
}

CocycleExpr::Kind CocycleExpr::kind() const { return node_->kind; }
int CocycleExpr::dim() const { return node_->dim; }
const std::vector<TrigPoly>& CocycleExpr::polys() const { return node_->polys; }
const Mat2R& CocycleExpr::matrix() const { return node_->matrix; }
double CocycleExpr::scale() const { return node_->scale; }
const Eigen::VectorXd& CocycleExpr::offset() const { return node_->offset; }
const std::vector<CocycleExpr>& CocycleExpr::children() const { return node_->children; }

Mat2C CocycleExpr::eval(const Eigen::VectorXcd& x) const {
  if (x.size() != dim()) throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  return node_eval<Complex>(*this, x);
}

Mat2R CocycleExpr::eval_real(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw Error(Errc::InvalidArgument, "evaluation point dimension mismatch");
  return node_eval<double>(*this, x);
}

std::pair<Mat2C, Mat2C> CocycleExpr::jet(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const {
  if (x.size() != dim() || v.size() != dim()) throw Error(Errc::InvalidArgument, "jet dimension mismatch");
  return node_jet<Complex>(*this, x, v);
}

std::pair<Mat2R, Mat2R> CocycleExpr::jet_real(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  if (x.size() != dim() || v.size() != dim()) throw Error(Errc::InvalidArgument, "jet dimension mismatch");
  return node_jet<double>(*this, x, v);
}

CocycleExpr CocycleExpr::inverse() const {
  switch (kind()) {
    case Kind::Rot: return rot(polys()[0] * Complex(-1.0));
    case Kind::DiagExp: return diag_exp(polys()[0] * Complex(-1.0));
    case Kind::ShearU: return shear_upper(polys()[0] * Complex(-1.0));
    case Kind::ShearL: return shear_lower(polys()[0] * Complex(-1.0));
    case Kind::Const: return constant(inverse_unimodular(matrix()), dim());
    case Kind::ExpSl2: return exp_sl2(polys()[0], polys()[1], polys()[2], -scale());
    case Kind::Product: {
      std::vector<CocycleExpr> inv;
      for (auto it = children().rbegin(); it != children().rend(); ++it) inv.push_back(it->inverse());
      return product(std::move(inv));
    }
    case Kind::Shift: return shift(offset(), children()[0].inverse());
  }
  return *this;
}

CocycleExpr CocycleExpr::insert_coordinate(int p) const {
  auto lift = [p](const TrigPoly& q) { return q.insert_coordinate(p); };
  switch (kind()) {
    case Kind::Rot: return rot(lift(polys()[0]));
    case Kind::DiagExp: return diag_exp(lift(polys()[0]));
    case Kind::ShearU: return shear_upper(lift(polys()[0]));
    case Kind::ShearL: return shear_lower(lift(polys()[0]));
    case Kind::Const: return constant(matrix(), dim() + 1);
    case Kind::ExpSl2: return exp_sl2(lift(polys()[0]), lift(polys()[1]), lift(polys()[2]), scale());
    case Kind::Product: {
      std::vector<CocycleExpr> out;
      for (const auto& c : children()) out.push_back(c.insert_coordinate(p));
      return product(std::move(out));
    }
    case Kind::Shift: {
      Eigen::VectorXd o(dim() + 1);
      o << offset().head(p), 0.0, offset().tail(dim() - p);
      return shift(o, children()[0].insert_coordinate(p));
    }
  }
  return *this;
}

CocycleExpr CocycleExpr::fix_coordinate(int p, Complex value) const {
  auto fix = [p, value](const TrigPoly& q) { return q.fix_coordinate(p, value); };
  switch (kind()) {
    case Kind::Rot: return rot(fix(polys()[0]));
    case Kind::DiagExp: return diag_exp(fix(polys()[0]));
    case Kind::ShearU: return shear_upper(fix(polys()[0]));
    case Kind::ShearL: return shear_lower(fix(polys()[0]));
    case Kind::Const: return constant(matrix(), dim() - 1);
    case Kind::ExpSl2: return exp_sl2(fix(polys()[0]), fix(polys()[1]), fix(polys()[2]), scale());
    case Kind::Product: {
      std::vector<CocycleExpr> out;
      for (const auto& c : children()) out.push_back(c.fix_coordinate(p, value));
      return product(std::move(out));
    }
    case Kind::Shift: {
      Eigen::VectorXd o(dim() - 1);
      o << offset().head(p), offset().tail(dim() - p - 1);
      return shift(o, children()[0].fix_coordinate(p, value + offset()[p]));
    }
  }
  return *this;
}

CocycleExpr CocycleExpr::translated(const Eigen::VectorXcd& s) const {
  auto tr = [&s](const TrigPoly& q) { return q.translated(s); };
  switch (kind()) {
    case Kind::Rot: return rot(tr(polys()[0]));
    case Kind::DiagExp: return diag_exp(tr(polys()[0]));
    case Kind::ShearU: return shear_upper(tr(polys()[0]));
    case Kind::ShearL: return shear_lower(tr(polys()[0]));
    case Kind::Const: return *this;
    case Kind::ExpSl2: return exp_sl2(tr(polys()[0]), tr(polys()[1]), tr(polys()[2]), scale());
    case Kind::Product: {
      std::vector<CocycleExpr> out;
      for (const auto& c : children()) out.push_back(c.translated(s));
      return product(std::move(out));
    }
    case Kind::Shift: return shift(offset(), children()[0].translated(s));
  }
  return *this;
}

int CocycleExpr::max_mode() const {
  int m = 0;
  for (const auto& q : polys())
    for (const auto& kv : q.modes())
      for (int k : kv.first) m = std::max(m, std::abs(k));
  for (const auto& c : children()) m = std::max(m, c.max_mode());
  return m;
}

bool CocycleExpr::operator==(const CocycleExpr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.dim != b.dim || a.scale != b.scale || a.matrix != b.matrix) return false;
  if (a.offset.size() != b.offset.size() || a.offset != b.offset) return false;
  return a.polys == b.polys && a.children == b.children;
}

Cocycle::Cocycle(Eigen::VectorXd alpha_, CocycleExpr expr_) : alpha(std::move(alpha_)), expr(std::move(expr_)) {
  if (alpha.size() != expr.dim()) throw Error(Errc::InvalidArgument, "frequency and expression dimensions differ");
  if (!alpha.allFinite()) throw Error(Errc::InvalidArgument, "frequency must be finite");
}

Cocycle Cocycle::conjugated(const CocycleExpr& b) const {
  return Cocycle(alpha, CocycleExpr::product({CocycleExpr::shift(alpha, b), expr, b.inverse()}));
}

Cocycle Cocycle::iterated(int n) const {
  if (n < 1) throw Error(Errc::InvalidArgument, "iterated needs n >= 1");
  std::vector<CocycleExpr> factors;
  for (int k = n - 1; k >= 1; --k) factors.push_back(CocycleExpr::shift(static_cast<double>(k) * alpha, expr));
  factors.push_back(expr);
  return Cocycle(static_cast<double>(n) * alpha, n == 1 ? expr : CocycleExpr::product(std::move(factors)));
}

Eigen::VectorXd reduce_mod1(Eigen::VectorXd x) {
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] -= std::floor(x[j]);
  return x;
}

Eigen::VectorXd orbit_point(const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha, long k) {
  Eigen::VectorXd x(x0.size());
  const double kd = static_cast<double>(k);
  for (Eigen::Index j = 0; j < x0.size(); ++j) {
    const double p = kd * alpha[j];
    const double err = std::fma(kd, alpha[j], -p);
    const double frac = p - std::floor(p);
    double v = x0[j] - std::floor(x0[j]) + frac + err;
    v -= std::floor(v);
    x[j] = v;
  }
  return x;
}

ScaledMat<double> iterate(const Cocycle& c, const Eigen::VectorXd& x, long n) {
  if (x.size() != c.dim()) throw Error(Errc::InvalidArgument, "iterate point dimension mismatch");
  ScaledMat<double> out;
  if (n > 0) {
    for (long k = 0; k < n; ++k) out.left_multiply(c.eval_real(orbit_point(x, c.alpha, k)));
  } else if (n < 0) {
    for (long k = 1; k <= -n; ++k) out.left_multiply(inverse_unimodular(c.eval_real(orbit_point(x, c.alpha, -k))));
  }
  return out;
}

ScaledMat<Complex> iterate(const Cocycle& c, const Eigen::VectorXcd& x, long n) {
  if (x.size() != c.dim()) throw Error(Errc::InvalidArgument, "iterate point dimension mismatch");
  const Eigen::VectorXd im = x.imag();
  const Eigen::VectorXd re = x.real();
  auto point = [&](long k) {
    const Eigen::VectorXd r = orbit_point(re, c.alpha, k);
    Eigen::VectorXcd z(r.size());
    for (Eigen::Index j = 0; j < r.size(); ++j) z[j] = Complex(r[j], im[j]);
    return z;
  };
  ScaledMat<Complex> out;
  if (n > 0) {
    for (long k = 0; k < n; ++k) out.left_multiply(c.eval(point(k)));
  } else if (n < 0) {
    for (long k = 1; k <= -n; ++k) out.left_multiply(inverse_unimodular(c.eval(point(-k))));
  }
  return out;
}

CocycleExpr rotation_model(const std::vector<int>& l) {
  if (l.empty()) throw Error(Errc::InvalidArgument, "rotation_model needs a nonempty integer vector");
  Eigen::VectorXd s(static_cast<Eigen::Index>(l.size()));
  for (std::size_t j = 0; j < l.size(); ++j) s[static_cast<Eigen::Index>(j)] = l[j];
  return CocycleExpr::rot(TrigPoly::linear(s));
}

CocycleExpr herman(double lambda, const std::vector<int>& l) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::InvalidArgument, "herman needs lambda > 0");
  Mat2R d = Mat2R::Zero();
  d(0, 0) = lambda;
  d(1, 1) = 1.0 / lambda;
  return CocycleExpr::product({CocycleExpr::constant(d, static_cast<int>(l.size())), rotation_model(l)});
}

CocycleExpr schrodinger(const TrigPoly& v, double energy) {
  Mat2R j;
  j << 0.0, -1.0, 1.0, 0.0;
  const TrigPoly q = v - TrigPoly::constant(v.dim(), energy);
  return CocycleExpr::product({CocycleExpr::constant(j, v.dim()), CocycleExpr::shear_lower(q)});
}

CocycleExpr exp_family(const TrigPoly& s1, const TrigPoly& s2, const TrigPoly& s3, double t) {
  return CocycleExpr::exp_sl2(s1, s2, s3, t);
}

double winding_of_samples(std::span<const Mat2R> samples) {
  std::vector<Complex> col;
  col.reserve(samples.size());
  for (const auto& m : samples) col.emplace_back(m(0, 0), m(1, 0));
  return phase_unwrap(col).total();
}

std::vector<int> homotopy_class(const CocycleExpr& a, int samples) {
  const int d = a.dim();
  std::vector<int> l(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    for (int n = std::max(samples, 4);; n *= 2) {
      std::vector<Mat2R> loop;
      loop.reserve(static_cast<std::size_t>(n) + 1);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
      for (int i = 0; i <= n; ++i) {
        x[j] = static_cast<double>(i) / n;
        loop.push_back(a.eval_real(x));
      }
      try {
        const double w = winding_of_samples(loop);
        const double r = std::round(w);
        if (std::abs(w - r) > 0.1)
          throw Error(Errc::NonIntegerWinding, "winding " + std::to_string(w) + " along coordinate " + std::to_string(j));
        l[static_cast<std::size_t>(j)] = static_cast<int>(r);
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::UnwrapStep || 2 * n > kWindingSamplesMax) throw;
      }
    }
  }
  return l;
}

}  // namespace sl2lab
