#pragma once

#include <Eigen/Core>
#include <random>

#include "sl2lab/algebra.hpp"

namespace sl2lab::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240517);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

/// Random real unimodular matrix R_a diag(e^s, e^-s) R_b with |s| <= smax.
inline Mat2R random_sl2r(double smax = 1.5) {
  Mat2R d = Mat2R::Zero();
  const double s = uniform(-smax, smax);
  d(0, 0) = std::exp(s);
  d(1, 1) = std::exp(-s);
  return rotation(uniform(0.0, 1.0)) * d * rotation(uniform(0.0, 1.0));
}

/// Random element of the interior of Upsilon: a real matrix in disk coordinates
/// followed by a strict radial contraction.
inline Mat2C random_upsilon(double cmin = 0.05, double cmax = 0.5) {
  const double c = uniform(cmin, cmax);
  Mat2C k = Mat2C::Zero();
  k(0, 0) = std::exp(Complex(-c));
  k(1, 1) = std::exp(Complex(c));
  return k * disk_coords(random_sl2r());
}

inline Complex random_disk_point(double rmax = 0.95) {
  return std::polar(std::sqrt(uniform(0.0, 1.0)) * rmax, kTwoPi * uniform(0.0, 1.0));
}

}  // namespace sl2lab::testing
