#pragma once

// Variation of the fibered rotation number along parameter paths, computed from
// continuous lifts of tau-hat = (1/2 pi i) log tau. The real part of a variation
// is in revolutions; the imaginary part carries the Lyapunov change.
//
// Orientation: vector angles increase under R_theta as theta increases, so a
// RotTwist loop theta: 0 -> 1 has variation +1.

#include <functional>
#include <vector>

#include "sl2lab/family.hpp"

namespace sl2lab {

inline constexpr int kPathStepsStart = 64;
inline constexpr int kPathStepsMax = 1 << 20;
/// Path refinement target: every consecutive lift increment stays below this.
inline constexpr double kPathIncrementTarget = 0.125;

/// gamma(t), t in [0, 1], a path of SL(2,C) matrices (original coordinates).
using MatrixPath = std::function<Mat2C(double)>;

struct PathLift {
  Complex value;  // tau-hat(gamma(1), z1) - tau-hat(gamma(0), z0)
  int steps = 0;  // path samples actually used
};

/// Lift of tau-hat along gamma with z moving on the segment z0 -> z1.
/// Refines from `steps` until every increment is below kPathIncrementTarget.
PathLift delta_xi(const MatrixPath& gamma, Complex z0, Complex z1, int steps = kPathStepsStart);

struct RotVariation {
  double delta_rho = 0.0;  // revolutions
  double delta_L = 0.0;    // nats: L(gamma(0)) - L(gamma(1))
  long n = 0;
  int path_steps = 0;      // largest refinement used over the fibers
  double tolerance = 0.0;  // z-dependence bound 1/n
};

/// Birkhoff average over n fibers of the path lift for theta: a -> b (straight
/// segment, complex endpoints allowed). The z's are forwarded fiber to fiber
/// by the endpoint matrices.
RotVariation variation_rho(const Family& f, Complex theta_a, Complex theta_b, const Eigen::VectorXd& x0, long n,
                           int steps = kPathStepsStart, Complex z0 = 0.0, Complex z1 = 0.0);

struct ProfilePoint {
  double theta = 0.0;
  double rho = 0.0;  // lifted, rho(theta_0) = 0
  double tolerance = 0.0;
};

/// Lifted rho along an ordered theta grid, glued from consecutive variations.
/// `imag_level` shifts every theta by i * imag_level.
std::vector<ProfilePoint> rho_profile(const Family& f, const std::vector<double>& thetas, const Eigen::VectorXd& x0,
                                      long n, double imag_level = 0.0);

struct FiberedRotation {
  double value_mod1 = 0.0;
  double lift_slope = 0.0;  // (1/N) sum of principal vector-angle increments
};

/// Vector-angle rotation number along the orbit of (x0, (1, 0)). Increments are
/// taken principal (in (-1/2, 1/2]); the reported slope depends on that choice
/// for cocycles that are not homotopic to a constant.
FiberedRotation fibered_rotation_number(const Cocycle& c, const Eigen::VectorXd& x0, long n);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

AffineFit affine_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sl2lab
