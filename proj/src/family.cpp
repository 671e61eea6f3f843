#include "sl2lab/family.hpp"

namespace sl2lab {

namespace {

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, 1> insert_param(const Eigen::Matrix<S, Eigen::Dynamic, 1>& x, S theta, int p) {
  const auto d = x.size();
  Eigen::Matrix<S, Eigen::Dynamic, 1> y(d + 1);
  y << x.head(p), theta, x.tail(d - p);
  return y;
}

Mat2R rotation_derivative(double theta) {
  const double c = std::cos(kTwoPi * theta), s = std::sin(kTwoPi * theta);
  Mat2R d;
  d << -s, -c, c, -s;
  return kTwoPi * d;
}

Mat2C rotation_derivative(Complex theta) {
  const Complex c = std::cos(kTwoPi * theta), s = std::sin(kTwoPi * theta);
  Mat2C d;
  d << -s, -c, c, -s;
  return kTwoPi * d;
}

}  // namespace

Family::Family(Kind kind, Eigen::VectorXd alpha, CocycleExpr expr, Eigen::VectorXd w, int param_index)
    : kind_(kind), alpha_(std::move(alpha)), expr_(std::move(expr)), w_(std::move(w)), param_index_(param_index) {}

Family Family::phase_shift(Cocycle base, Eigen::VectorXd w) {
  if (w.size() != base.dim() || !w.allFinite()) throw Error(Errc::InvalidArgument, "phase direction dimension mismatch");
  return Family(Kind::PhaseShift, base.alpha, base.expr, std::move(w), 0);
}

Family Family::rot_twist(Cocycle base) { return Family(Kind::RotTwist, base.alpha, base.expr, Eigen::VectorXd(), 0); }

Family Family::general(Eigen::VectorXd alpha, CocycleExpr expr, int param_index) {
  if (expr.dim() != alpha.size() + 1) throw Error(Errc::InvalidArgument, "general family needs an expression over T^{d+1}");
  if (param_index < 0 || param_index > alpha.size()) throw Error(Errc::InvalidArgument, "parameter index out of range");
  return Family(Kind::General, std::move(alpha), std::move(expr), Eigen::VectorXd(), param_index);
}

Mat2C Family::eval(const Eigen::VectorXcd& x, Complex theta) const {
  switch (kind_) {
    case Kind::PhaseShift: return expr_.eval(x + theta * w_.cast<Complex>());
    case Kind::RotTwist: return rotation(theta) * expr_.eval(x);
    case Kind::General: return expr_.eval(insert_param<Complex>(x, theta, param_index_));
  }
  return Mat2C::Identity();
}

Mat2R Family::eval_real(const Eigen::VectorXd& x, double theta) const {
  switch (kind_) {
    case Kind::PhaseShift: return expr_.eval_real(x + theta * w_);
    case Kind::RotTwist: return rotation(theta) * expr_.eval_real(x);
    case Kind::General: return expr_.eval_real(insert_param<double>(x, theta, param_index_));
  }
  return Mat2R::Identity();
}

std::pair<Mat2R, Mat2R> Family::theta_jet(const Eigen::VectorXd& x, double theta) const {
  switch (kind_) {
    case Kind::PhaseShift: return expr_.jet_real(x + theta * w_, w_);
    case Kind::RotTwist: {
      const Mat2R a = expr_.eval_real(x);
      return {rotation(theta) * a, rotation_derivative(theta) * a};
    }
    case Kind::General: {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim() + 1);
      e[param_index_] = 1.0;
      return expr_.jet_real(insert_param<double>(x, theta, param_index_), e);
    }
  }
  return {};
}

std::pair<Mat2C, Mat2C> Family::theta_jet(const Eigen::VectorXcd& x, Complex theta) const {
  switch (kind_) {
    case Kind::PhaseShift: return expr_.jet(x + theta * w_.cast<Complex>(), w_);
    case Kind::RotTwist: {
      const Mat2C a = expr_.eval(x);
      return {rotation(theta) * a, rotation_derivative(theta) * a};
    }
    case Kind::General: {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim() + 1);
      e[param_index_] = 1.0;
      return expr_.jet(insert_param<Complex>(x, theta, param_index_), e);
    }
  }
  return {};
}

Cocycle Family::at(Complex theta) const {
  switch (kind_) {
    case Kind::PhaseShift: return Cocycle(alpha_, expr_.translated(theta * w_.cast<Complex>()));
    case Kind::RotTwist:
      return Cocycle(alpha_, CocycleExpr::product({CocycleExpr::rot(TrigPoly::constant(dim(), theta)), expr_}));
    case Kind::General: return Cocycle(alpha_, expr_.fix_coordinate(param_index_, theta));
  }
  return Cocycle(alpha_, expr_);
}

Family Family::iterated(int n) const {
  if (n < 1) throw Error(Errc::InvalidArgument, "iterated needs n >= 1");
  switch (kind_) {
    case Kind::PhaseShift: return phase_shift(Cocycle(alpha_, expr_).iterated(n), w_);
    case Kind::RotTwist: return to_general().iterated(n);
    case Kind::General: {
      Eigen::VectorXd a(dim() + 1);
      a << alpha_.head(param_index_), 0.0, alpha_.tail(dim() - param_index_);
      const Cocycle lifted = Cocycle(a, expr_).iterated(n);
      return general(static_cast<double>(n) * alpha_, lifted.expr, param_index_);
    }
  }
  return *this;
}

Family Family::to_general() const {
  switch (kind_) {
    case Kind::General: return *this;
    case Kind::RotTwist: {
      const int p = dim();
      Eigen::VectorXd e = Eigen::VectorXd::Zero(p + 1);
      e[p] = 1.0;
      return general(alpha_, CocycleExpr::product({CocycleExpr::rot(TrigPoly::linear(e)), expr_.insert_coordinate(p)}), p);
    }
    case Kind::PhaseShift: break;
  }
  throw Error(Errc::InvalidArgument, "phase-shift families have no general form for non-integer directions");
}

bool Family::operator==(const Family& other) const {
  return kind_ == other.kind_ && alpha_ == other.alpha_ && expr_ == other.expr_ && w_.size() == other.w_.size() &&
         w_ == other.w_ && param_index_ == other.param_index_;
}

Family schrodinger_energy_family(const TrigPoly& v, const Eigen::VectorXd& alpha) {
  const int d = v.dim();
  if (alpha.size() != d) throw Error(Errc::InvalidArgument, "potential and frequency dimensions differ");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d + 1);
  e[d] = 1.0;
  const TrigPoly q = v.insert_coordinate(d) - TrigPoly::linear(e);
  Mat2R j;
  j << 0.0, -1.0, 1.0, 0.0;
  return Family::general(alpha, CocycleExpr::product({CocycleExpr::constant(j, d + 1), CocycleExpr::shear_lower(q)}), d);
}

}  // namespace sl2lab
