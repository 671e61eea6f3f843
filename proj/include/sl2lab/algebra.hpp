#pragma once

// 2x2 matrix algebra for SL(2,R)/SL(2,C), Moebius actions, the Cayley-type
// conjugation to SU(1,1) and Poincare-disk geometry.
//
// Angles are measured in revolutions (arg / 2pi) everywhere in the library.
// The disk metric is |dz| / (1 - |z|^2), so d(0, r) = artanh(r).

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "sl2lab/error.hpp"

namespace sl2lab {

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

using Real = double;
using Complex = std::complex<double>;
using Mat2R = Mat2<double>;
using Mat2C = Mat2<Complex>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Rotation R_theta by 2*pi*theta (theta in revolutions). Works for complex
/// theta, which is how the analytic extension of rotation families is built.
template <typename Scalar>
Mat2<Scalar> rotation(const Scalar& theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(Scalar(kTwoPi) * theta);
  const Scalar s = sin(Scalar(kTwoPi) * theta);
  Mat2<Scalar> r;
  r << c, -s, s, c;
  return r;
}

template <typename Real_>
Mat2<std::complex<Real_>> q_matrix() {
  using C = std::complex<Real_>;
  const C pre = C(-1) / C(1, 1);
  Mat2<C> q;
  q << pre, -pre * C(0, 1), pre, pre * C(0, 1);
  return q;
}

template <typename Real_>
Mat2<std::complex<Real_>> q_inverse() {
  using C = std::complex<Real_>;
  const C pre = C(-1) / C(1, 1);
  Mat2<C> q;
  q << pre * C(0, 1), pre * C(0, 1), -pre, pre;
  return q;
}

/// Q A Q^{-1}: SL(2,R) -> SU(1,1). The projective action of the result on
/// the Riemann sphere is the action of A on lines through (x,y) ~ (x-iy)/(x+iy).
template <typename Derived>
auto disk_coords(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using C = std::complex<S>;
  const Mat2<C> ac = a.template cast<C>();
  return Mat2<C>(q_matrix<S>() * ac * q_inverse<S>());
}

/// Inverse of disk_coords.
template <typename Derived>
auto from_disk_coords(const Eigen::MatrixBase<Derived>& a) {
  using S = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  using C = std::complex<S>;
  const Mat2<C> ac = a.template cast<C>();
  return Mat2<C>(q_inverse<S>() * ac * q_matrix<S>());
}

template <typename Scalar>
Mat2<Scalar> inverse_unimodular(const Mat2<Scalar>& a) {
  Mat2<Scalar> r;
  r << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return r;
}

/// A point of the Riemann sphere.
template <typename Real_>
struct Extended {
  std::complex<Real_> value{};
  bool infinite = false;

  static Extended infinity() { return Extended{{}, true}; }
};

template <typename Real_>
Extended<Real_> mobius_apply(const Mat2<std::complex<Real_>>& m, const Extended<Real_>& z) {
  using C = std::complex<Real_>;
  if (z.infinite) {
    if (m(1, 0) == C(0)) return Extended<Real_>::infinity();
    return {m(0, 0) / m(1, 0), false};
  }
  const C den = m(1, 0) * z.value + m(1, 1);
  if (den == C(0)) return Extended<Real_>::infinity();
  return {(m(0, 0) * z.value + m(0, 1)) / den, false};
}

/// Finite-point Moebius action used on hot paths; no infinity handling.
template <typename Real_>
inline std::complex<Real_> mobius(const Mat2<std::complex<Real_>>& m, const std::complex<Real_>& z) {
  return (m(0, 0) * z + m(0, 1)) / (m(1, 0) * z + m(1, 1));
}

template <typename Real_>
struct EuclideanDisk {
  std::complex<Real_> center{};
  Real_ radius{};

  /// Closure contained in the open unit disk with the given margin.
  bool inside_unit_disk(Real_ margin = Real_(0)) const {
    return std::abs(center) + radius < Real_(1) - margin;
  }
};

/// Image of the open unit disk under z -> (az+b)/(cz+d). Requires the pole
/// -d/c to lie outside the closed disk, i.e. |d| > |c|.
template <typename Real_>
EuclideanDisk<Real_> mobius_image_disk(const Mat2<std::complex<Real_>>& m) {
  using std::abs;
  using std::conj;
  const Real_ ad = abs(m(1, 1));
  const Real_ ac = abs(m(1, 0));
  if (!(ad > ac + Real_(1e-12)))
    throw Error(Errc::PoleOnCircle, "image of the unit circle passes through infinity");
  const Real_ den = std::norm(m(1, 1)) - std::norm(m(1, 0));
  EuclideanDisk<Real_> out;
  out.center = (m(0, 1) * conj(m(1, 1)) - m(0, 0) * conj(m(1, 0))) / den;
  out.radius = abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / den;
  return out;
}

/// tau_A(z) for a matrix already in disk coordinates: the scalar with
/// M (z,1)^T = tau (M.z, 1)^T, i.e. c z + d.
template <typename Real_>
std::complex<Real_> tau(const Mat2<std::complex<Real_>>& disk_matrix, const std::complex<Real_>& z) {
  const std::complex<Real_> t = disk_matrix(1, 0) * z + disk_matrix(1, 1);
  if (std::abs(t) < Real_(1e-14)) throw Error(Errc::DegenerateTau, "tau vanishes (matrix outside the closure of Upsilon)");
  return t;
}

/// Continuous lift of arg/2pi along a sequence of nonzero complex numbers.
struct PhaseLift {
  std::vector<double> values;

  double total() const { return values.empty() ? 0.0 : values.back() - values.front(); }
};

inline constexpr double kUnwrapThreshold = 0.45;

PhaseLift phase_unwrap(std::span<const Complex> seq);

/// Increment of the lift between two nonzero complex numbers, in (-1/2, 1/2].
inline double phase_step(const Complex& from, const Complex& to) {
  return std::arg(to * std::conj(from)) / kTwoPi;
}

template <typename Real_>
Real_ hyperbolic_distance(const std::complex<Real_>& z, const std::complex<Real_>& w) {
  const Real_ bound = Real_(1) - Real_(1e-12);
  if (!(std::abs(z) < bound) || !(std::abs(w) < bound))
    throw Error(Errc::BoundaryPoint, "hyperbolic distance needs points in the open disk");
  const Real_ r = std::abs(z - w) / std::abs(Real_(1) - std::conj(w) * z);
  return std::atanh(std::min(r, Real_(1) - std::numeric_limits<Real_>::epsilon()));
}

/// SU(1,1) disk automorphism sending w to 0: z -> (z - w) / (1 - conj(w) z).
template <typename Real_>
Mat2<std::complex<Real_>> disk_automorphism_to_origin(const std::complex<Real_>& w) {
  using C = std::complex<Real_>;
  const Real_ s = Real_(1) / std::sqrt(Real_(1) - std::norm(w));
  Mat2<C> m;
  m << C(s), -w * s, -std::conj(w) * s, C(s);
  return m;
}

/// Largest singular value of a 2x2 matrix.
template <typename Scalar>
typename Eigen::NumTraits<Scalar>::Real spectral_norm(const Mat2<Scalar>& a) {
  using R = typename Eigen::NumTraits<Scalar>::Real;
  const R f2 = a.squaredNorm();
  const R det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  const R disc = std::max(R(0), f2 * f2 - R(4) * det * det);
  return std::sqrt((f2 + std::sqrt(disc)) / R(2));
}

/// Smallest singular value of a 2x2 matrix.
template <typename Scalar>
typename Eigen::NumTraits<Scalar>::Real smallest_singular_value(const Mat2<Scalar>& a) {
  using R = typename Eigen::NumTraits<Scalar>::Real;
  const R smax = spectral_norm(a);
  if (smax == R(0)) return R(0);
  return std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / smax;
}

/// Rescale a (nearly) unimodular complex matrix by det^{-1/2}, choosing the
/// square-root branch closest to `previous_factor`. Returns the factor used.
Complex repair_determinant(Mat2C& m, Complex previous_factor = Complex(1.0));

/// Polar decomposition of a real 2x2 matrix with positive determinant:
/// A = K P with K = R_angle a rotation and P symmetric positive definite.
struct Polar {
  double angle = 0.0;  // revolutions, principal value in (-1/2, 1/2]
  Mat2R positive;
};

Polar polar_decompose(const Mat2R& a);

/// Symmetric matrix logarithm / exponential (for positive definite input).
Mat2R symmetric_log(const Mat2R& p);
Mat2R symmetric_exp(const Mat2R& s);

}  // namespace sl2lab
