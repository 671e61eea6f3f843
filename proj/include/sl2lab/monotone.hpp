#pragma once

// Monotonicity of one-parameter families: the angular speed of A_theta(x) y in
// theta, in radians of vector angle per unit parameter. Positive means vector
// angles increase with theta (the orientation of R_theta).

#include <vector>

#include "sl2lab/family.hpp"
#include "sl2lab/grid.hpp"

namespace sl2lab {

/// Speeds with |value| below this count as zero in sign checks.
inline constexpr double kSpeedZeroTol = 1e-12;

enum class MonotoneStatus { Certified, Uncertified, NotMonotonic };

const char* monotone_status_name(MonotoneStatus s);

struct MonotoneWitness {
  Eigen::VectorXd x;
  double y_angle = 0.0;  // radians, direction (cos, sin)
  double theta = 0.0;
  double speed = 0.0;
};

struct MonotonicityReport {
  MonotoneStatus status = MonotoneStatus::Uncertified;
  /// Signed extreme speed: the infimum if the scan is nonnegative, the supremum
  /// if it is nonpositive, and the infimum otherwise.
  double epsilon = 0.0;
  MonotoneWitness argmin;
  /// Largest speed change between neighbouring grid nodes.
  double lipschitz_margin = 0.0;
  /// Present when status is NotMonotonic: a node with the opposite sign to argmin.
  MonotoneWitness opposite;
  std::size_t x_nodes = 0;
  std::size_t theta_nodes = 0;
  double min_speed = 0.0;
  double max_speed = 0.0;

  bool certified() const { return status == MonotoneStatus::Certified; }
};

/// Minimum and maximum over directions y of d/dtheta arg(A_theta(x) y), exactly:
/// the two roots of det(S - lambda P) = 0 for the quadratic forms
/// P = A^T A and S = sym(A^T J A').
struct SpeedRange {
  double min = 0.0;
  double max = 0.0;
  double argmin_angle = 0.0;
};
SpeedRange angular_speed_range(const Mat2R& a, const Mat2R& da);

/// Angular speed of the single direction y.
double angular_speed(const Mat2R& a, const Mat2R& da, const Eigen::Vector2d& y);

MonotonicityReport monotonicity_constant(const Family& f, const TorusGrid& xgrid, const std::vector<double>& thetas);

struct ConeSample {
  Eigen::VectorXd w;
  MonotonicityReport report;
};

struct ConeReport {
  std::vector<ConeSample> samples;
  /// False if the midpoint of two directions certified with the same sign
  /// reports NotMonotonic.
  bool convexity_ok = true;
};

/// PhaseShift(w) reports at theta = 0 (translation invariance makes a theta
/// scan redundant).
ConeReport w_cone_sample(const Cocycle& c, const std::vector<Eigen::VectorXd>& directions, const TorusGrid& xgrid);

}  // namespace sl2lab
