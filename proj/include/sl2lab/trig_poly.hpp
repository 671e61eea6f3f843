#pragma once

#include <Eigen/Core>
#include <map>
#include <utility>
#include <vector>

#include "sl2lab/algebra.hpp"

namespace sl2lab {

using Mode = std::vector<int>;

/// A phase function on R^d: a finite Fourier sum plus a linear part,
///   p(x) = sum_k c_k e^{2 pi i <k,x>} + <slope, x>.
/// The linear part carries the homotopy data of rotation models; the Fourier
/// part is 1-periodic. Evaluation at complex x is the analytic continuation.
class TrigPoly {
 public:
  explicit TrigPoly(int dim = 1);

  static TrigPoly constant(int dim, Complex c);
  static TrigPoly linear(const Eigen::VectorXd& slope);
  /// amplitude * cos(2 pi (<k,x> + phase))
  static TrigPoly cosine(const Mode& k, double amplitude, double phase = 0.0);
  /// amplitude * sin(2 pi (<k,x> + phase))
  static TrigPoly sine(const Mode& k, double amplitude, double phase = 0.0);

  TrigPoly& add(const Mode& k, Complex coefficient);
  TrigPoly& set_slope(const Eigen::VectorXd& slope);

  int dim() const { return dim_; }
  const std::map<Mode, Complex>& modes() const { return modes_; }
  const Eigen::VectorXd& slope() const { return slope_; }
  Complex coefficient(const Mode& k) const;
  Complex mean() const { return coefficient(Mode(dim_, 0)); }
  bool has_linear_part() const { return slope_.cwiseAbs().maxCoeff() > 0.0; }

  Complex operator()(const Eigen::VectorXcd& x) const;
  Complex operator()(const Eigen::VectorXd& x) const;
  /// Value and directional derivative along v.
  std::pair<Complex, Complex> jet(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const;

  /// c_{-k} = conj(c_k) for all stored k (up to tol).
  bool is_real(double tol = 0.0) const;

  /// x -> p(<l, x>) for a one-dimensional p.
  TrigPoly compose_linear(const std::vector<int>& l) const;
  /// x -> p(x + shift); a complex shift gives the continuation off the real torus.
  TrigPoly translated(const Eigen::VectorXcd& shift) const;
  TrigPoly translated(const Eigen::VectorXd& shift) const { return translated(Eigen::VectorXcd(shift.cast<Complex>())); }
  /// Keep modes with max |k_j| <= max_mode.
  TrigPoly truncated(int max_mode) const;
  /// Fourier part only, mean removed.
  TrigPoly oscillating_part() const;
  /// Embed into dimension d+1 with a new coordinate at index p (no dependence on it).
  TrigPoly insert_coordinate(int p) const;
  /// Substitute x_p = value; the result has dimension d-1.
  TrigPoly fix_coordinate(int p, Complex value) const;

  /// sum_k |c_k| (sup bound of the periodic part on the real torus)
  double coefficient_l1() const;

  TrigPoly& operator+=(const TrigPoly& other);
  TrigPoly& operator*=(Complex s);

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a += b * Complex(-1.0); }
  friend TrigPoly operator*(TrigPoly a, Complex s) { return a *= s; }
  friend TrigPoly operator*(Complex s, TrigPoly a) { return a *= s; }

  bool operator==(const TrigPoly& other) const = default;

 private:
  int dim_;
  std::map<Mode, Complex> modes_;
  Eigen::VectorXd slope_;
};

}  // namespace sl2lab
