#pragma once

// Quasiperiodic cocycles (x, w) -> (x + alpha, A(x) w) over the d-torus, with
// A given by an exact expression tree of SL(2,R)-valued building blocks.

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "sl2lab/algebra.hpp"
#include "sl2lab/trig_poly.hpp"

namespace sl2lab {

class CocycleExpr {
 public:
  enum class Kind { Rot, DiagExp, ShearU, ShearL, Const, ExpSl2, Product, Shift };

  /// R_{phi(x)}
  static CocycleExpr rot(TrigPoly phi);
  /// diag(e^{p(x)}, e^{-p(x)})
  static CocycleExpr diag_exp(TrigPoly p);
  /// [[1, q(x)], [0, 1]]
  static CocycleExpr shear_upper(TrigPoly q);
  /// [[1, 0], [q(x), 1]]
  static CocycleExpr shear_lower(TrigPoly q);
  static CocycleExpr constant(const Mat2R& m, int dim);
  /// exp(t s(x)), s = [[s1, s2 + s3], [s2 - s3, -s1]]
  static CocycleExpr exp_sl2(TrigPoly s1, TrigPoly s2, TrigPoly s3, double t);
  /// Ordered product; the first child is the leftmost factor.
  static CocycleExpr product(std::vector<CocycleExpr> children);
  /// x -> child(x + offset)
  static CocycleExpr shift(const Eigen::VectorXd& offset, CocycleExpr child);

  Kind kind() const;
  int dim() const;
  const std::vector<TrigPoly>& polys() const;
  const Mat2R& matrix() const;
  double scale() const;
  const Eigen::VectorXd& offset() const;
  const std::vector<CocycleExpr>& children() const;

  Mat2C eval(const Eigen::VectorXcd& x) const;
  /// Real part of the evaluation; exact for real-coefficient trees.
  Mat2R eval_real(const Eigen::VectorXd& x) const;
  /// Value and derivative along v.
  std::pair<Mat2C, Mat2C> jet(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const;
  std::pair<Mat2R, Mat2R> jet_real(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;

  /// Pointwise inverse, again an exact tree.
  CocycleExpr inverse() const;
  /// Same map in dimension d+1, independent of coordinate p.
  CocycleExpr insert_coordinate(int p) const;
  /// Substitute x_p = value (possibly complex); dimension d-1.
  CocycleExpr fix_coordinate(int p, Complex value) const;
  /// x -> E(x + shift), pushed into the leaves (complex shifts allowed).
  CocycleExpr translated(const Eigen::VectorXcd& shift) const;
  /// Largest |Fourier mode| appearing in any leaf (0 for constants).
  int max_mode() const;

  bool operator==(const CocycleExpr& other) const;

  friend CocycleExpr operator*(const CocycleExpr& a, const CocycleExpr& b) { return product({a, b}); }

 private:
  struct Node;
  explicit CocycleExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Cocycle {
  Eigen::VectorXd alpha;
  CocycleExpr expr;

  Cocycle(Eigen::VectorXd alpha_, CocycleExpr expr_);

  int dim() const { return static_cast<int>(alpha.size()); }
  Mat2C eval(const Eigen::VectorXcd& x) const { return expr.eval(x); }
  Mat2R eval_real(const Eigen::VectorXd& x) const { return expr.eval_real(x); }

  /// The conjugated cocycle x -> B(x + alpha) A(x) B(x)^{-1}.
  Cocycle conjugated(const CocycleExpr& b) const;
  /// The n-th iterate A_n as a cocycle over x -> x + n alpha (n >= 1).
  Cocycle iterated(int n) const;

  bool operator==(const Cocycle& other) const { return alpha == other.alpha && expr == other.expr; }
};

/// Product kept as e^{log_scale} * m with max |m_ij| in [1/2, 2].
template <typename Scalar>
struct ScaledMat {
  Mat2<Scalar> m = Mat2<Scalar>::Identity();
  double log_scale = 0.0;

  void normalize() {
    const double s = m.cwiseAbs().maxCoeff();
    if (s == 0.0 || !std::isfinite(s)) throw Error(Errc::Overflow, "matrix product left the representable range");
    if (s < 0.5 || s > 2.0) {
      m /= Scalar(s);
      log_scale += std::log(s);
    }
  }
  void left_multiply(const Mat2<Scalar>& a) {
    m = a * m;
    normalize();
  }
  void right_multiply(const Mat2<Scalar>& a) {
    m = m * a;
    normalize();
  }
  Mat2<Scalar> value() const { return std::exp(log_scale) * m; }
};

/// Reduce each coordinate of a real torus point to [0, 1).
Eigen::VectorXd reduce_mod1(Eigen::VectorXd x);
/// x0 + k alpha reduced mod 1, with the product k alpha compensated so the
/// error stays at the rounding level of numbers of size 1 for any k.
Eigen::VectorXd orbit_point(const Eigen::VectorXd& x0, const Eigen::VectorXd& alpha, long k);

/// A_n(x): A(x + (n-1) alpha) ... A(x) for n > 0, identity for n = 0,
/// A(x - n alpha)^{-1} ... A(x - alpha)^{-1} for n < 0.
ScaledMat<double> iterate(const Cocycle& c, const Eigen::VectorXd& x, long n);
/// Same at a complex point (imaginary part is carried unchanged along the orbit).
ScaledMat<Complex> iterate(const Cocycle& c, const Eigen::VectorXcd& x, long n);

/// R_{<l,x>}
CocycleExpr rotation_model(const std::vector<int>& l);
/// diag(lambda, 1/lambda) R_{<l,x>}
CocycleExpr herman(double lambda, const std::vector<int>& l);
/// [[E - v(x), -1], [1, 0]]
CocycleExpr schrodinger(const TrigPoly& v, double energy);
/// exp(t s(x))
CocycleExpr exp_family(const TrigPoly& s1, const TrigPoly& s2, const TrigPoly& s3, double t);

inline constexpr int kWindingSamples = 1024;
inline constexpr int kWindingSamplesMax = 1 << 16;

/// l_j = winding of the first column of A(x) as x_j runs over one loop with the
/// other coordinates at 0. Sampling doubles on UnwrapStep up to 2^16.
std::vector<int> homotopy_class(const CocycleExpr& a, int samples = kWindingSamples);
inline std::vector<int> homotopy_class(const Cocycle& c, int samples = kWindingSamples) {
  return homotopy_class(c.expr, samples);
}

/// Winding of the first column of sampled matrices along a closed loop.
double winding_of_samples(std::span<const Mat2R> samples);

}  // namespace sl2lab
