#pragma once

// Continued-fraction renormalization of one-frequency cocycles: commuting
// pairs over x -> x + 1 and x -> x + alpha_n, normalizing maps, and sampled
// renormalization representatives with their distance to rotation models.

#include <vector>

#include "sl2lab/algebra.hpp"
#include "sl2lab/cocycle.hpp"

namespace sl2lab {

inline constexpr double kRationalBetaMin = 1e-13;
inline constexpr double kCommutationTol = 1e-8;
inline constexpr int kCommutationPoints = 64;
inline constexpr double kNormalizingTol = 1e-8;
inline constexpr double kPeriodicityTol = 1e-7;
inline constexpr int kRepresentativeNodes = 1024;

/// Levels n = 0..depth-1; index n - 1 = -1 is stored separately (beta_{-1} = 1).
struct CFData {
  double alpha = 0.0;
  std::vector<long> a;  // a[n], with a[0] = 0
  std::vector<long> p, q;
  std::vector<double> beta;   // (-1)^n (q_n alpha - p_n) > 0
  std::vector<double> alphas; // beta_n / beta_{n-1}

  int depth() const { return static_cast<int>(q.size()); }
  /// beta_{n}, also for n = -1.
  double beta_at(int n) const { return n < 0 ? 1.0 : beta.at(static_cast<std::size_t>(n)); }
  long q_at(int n) const { return n < 0 ? 0 : q.at(static_cast<std::size_t>(n)); }
};

CFData continued_fraction(double alpha, int depth);

/// A^{(n,0)}(x) = A_{(-1)^{n-1} q_{n-1}}(x* + beta_{n-1} x),
/// A^{(n,1)}(x) = A_{(-1)^n q_n}(x* + beta_{n-1} x).
struct RenormPair {
  Cocycle base;
  int level = 1;
  double x_star = 0.0;
  double alpha_n = 0.0;
  double beta_prev = 1.0;
  long k0 = 0, k1 = 0;
  /// max over the check grid of |lhs - rhs| / max(1, |lhs|).
  double commutation_residual = 0.0;

  Mat2R a0(double x) const;
  Mat2R a1(double x) const;
};

/// Requires a one-frequency base and 1 <= n < cf.depth(); checks commutation
/// on kCommutationPoints points of [0, 1).
RenormPair commuting_pair(const Cocycle& c, const CFData& cf, int n, double x_star = 0.0);

/// Smooth step on [0, 1], flat to all orders at both ends.
double smooth_step(double x);

/// B with B(x + 1) A^{(n,0)}(x) B(x)^{-1} = Id. On [0, 1), B = C * Bq * M:
/// M is a constant frame in which the pair is closest to rotation valued,
/// Bq(x) = R_{-(a (x^2 - x) / 2 + b x)} absorbs the affine fit a x + b of the
/// lifted rotation angle of M A^{(n,0)} M^{-1}, and C runs from Id to the
/// polar factors of the remaining defect along the smooth step. Other x
/// follow from the defining relation.
struct NormalizingMap {
  RenormPair pair;
  Mat2R frame = Mat2R::Identity();
  double phase_slope = 0.0;   // a
  double phase_offset = 0.0;  // b
  double seed_angle = 0.0;    // rotation part of the defect, revolutions
  Mat2R seed_log;             // symmetric log of its positive part
  double residual = 0.0;

  Mat2R operator()(double x) const;
  /// Bq(x + 1) M A^{(n,0)}(x) M^{-1} Bq(x)^{-1}.
  Mat2R reduced_a0(double x) const;
  Mat2R quadratic_part(double x) const;
};

NormalizingMap normalizing_map(const RenormPair& p, int check_points = kCommutationPoints);

/// A^{(n)}(x) = B(x + alpha_n) A^{(n,1)}(x) B(x)^{-1} sampled at j / N.
struct Representative {
  int level = 0;
  double alpha = 0.0;
  std::vector<double> nodes;
  std::vector<Mat2R> values;
  double periodicity_residual = 0.0;

  /// Winding of the first column over one period.
  int degree() const;
  /// max |sigma_i^2 - 1| over samples.
  double rotation_defect() const;
};

Representative renorm_representative(const NormalizingMap& b, int nodes = kRepresentativeNodes);

struct RotationFit {
  double theta = 0.0;
  double distance = 0.0;
};

/// argmin over theta in [0, 1) of max_j |R_{-theta - (-1)^n deg x_j} A(x_j) - Id|.
RotationFit rotation_distance(const Representative& a, int deg, int n);

struct RenormLevel {
  int n = 0;
  double alpha_n = 0.0;
  double commutation_residual = 0.0;
  double normalizing_residual = 0.0;
  double periodicity_residual = 0.0;
  double theta_hat = 0.0;
  double distance = 0.0;
  int degree = 0;
  double rotation_defect = 0.0;
};

/// Levels 1..depth of the cocycle's renormalization around x*.
std::vector<RenormLevel> renorm_cascade(const Cocycle& c, int depth, double x_star = 0.0,
                                        int nodes = kRepresentativeNodes);

}  // namespace sl2lab
