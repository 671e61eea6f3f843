#pragma once

#include <Eigen/Core>
#include <utility>

#include "sl2lab/cocycle.hpp"

namespace sl2lab {

/// One-parameter family theta -> A_theta of cocycles over the same translation.
///   PhaseShift(w): A_theta(x) = A(x + theta w)
///   RotTwist:      A_theta(x) = R_theta A(x)
///   General:       A_theta(x) = E(x with theta inserted at coordinate p), E over T^{d+1}
/// In the General case the parameter coordinate may be non-periodic (an energy).
class Family {
 public:
  enum class Kind { PhaseShift, RotTwist, General };

  static Family phase_shift(Cocycle base, Eigen::VectorXd w);
  static Family rot_twist(Cocycle base);
  static Family general(Eigen::VectorXd alpha, CocycleExpr expr, int param_index);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Base cocycle for PhaseShift/RotTwist, or the (d+1)-dimensional expression for General.
  const CocycleExpr& expr() const { return expr_; }
  const Eigen::VectorXd& w() const { return w_; }
  int param_index() const { return param_index_; }

  Mat2C eval(const Eigen::VectorXcd& x, Complex theta) const;
  Mat2R eval_real(const Eigen::VectorXd& x, double theta) const;
  /// A_theta(x) and d/dtheta A_theta(x).
  std::pair<Mat2R, Mat2R> theta_jet(const Eigen::VectorXd& x, double theta) const;
  std::pair<Mat2C, Mat2C> theta_jet(const Eigen::VectorXcd& x, Complex theta) const;

  /// The cocycle at a fixed (possibly complex) parameter.
  Cocycle at(Complex theta) const;
  /// The family of n-th iterates theta -> (A_theta)_n.
  Family iterated(int n) const;
  /// Equivalent General family.
  Family to_general() const;

  bool operator==(const Family& other) const;

 private:
  Family(Kind kind, Eigen::VectorXd alpha, CocycleExpr expr, Eigen::VectorXd w, int param_index);

  Kind kind_;
  Eigen::VectorXd alpha_;
  CocycleExpr expr_;
  Eigen::VectorXd w_;
  int param_index_ = 0;
};

/// Schroedinger family in the energy: E -> [[E - v(x), -1], [1, 0]] over T^{d+1}
/// with the energy at coordinate d.
Family schrodinger_energy_family(const TrigPoly& v, const Eigen::VectorXd& alpha);

}  // namespace sl2lab
