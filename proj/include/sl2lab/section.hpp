#pragma once

// Invariant sections of complexified cocycles, the Lyapunov exponent read off
// from them, and the strip experiments built on top (U(t), Kotani integrals,
// the second-derivative limit and the derivative bound).

#include <vector>

#include "sl2lab/complexify.hpp"
#include "sl2lab/lyap.hpp"
#include "sl2lab/monotone.hpp"
#include "sl2lab/rotnum.hpp"

namespace sl2lab {

inline constexpr double kSectionTol = 1e-13;
inline constexpr int kSectionMaxIterations = 200000;
/// Update ratios above this (sustained) signal a level too close to the real axis.
inline constexpr double kSlowContractionRatio = 1.0 - 1e-4;

enum class SectionKind {
  Forward,  // m+: m(x + alpha) = A(x) m(x), attracting on the contracting side
  Backward  // m-: m(x) = A(x)^{-1} m(x + alpha), attracting on the mirrored side
};

/// Disk-valued section sampled on a uniform tensor grid, at theta = sigma + i side t.
struct DiskSection {
  TorusGrid grid;
  std::vector<Complex> values;
  SectionKind kind = SectionKind::Forward;
  double sigma = 0.0;
  double t = 0.0;
  StripSide side = StripSide::Lower;
  double residual = 0.0;  // max hyperbolic distance of the invariance defect over nodes
  int iterations = 0;
};

/// m+ at level t on `side`: graph transform m -> A(x - alpha) m(x - alpha) from m = 0,
/// trigonometric interpolation between nodes.
DiskSection invariant_section(const StripCocycle& s, double sigma, double t, StripSide side, const TorusGrid& grid,
                              double tol = kSectionTol);

/// m- at the mirrored level sigma - i side t: graph transform of the inverse cocycle,
/// m -> A(x)^{-1} m(x + alpha). Already in the disk (no reflection needed).
DiskSection invariant_section_minus(const StripCocycle& s, double sigma, double t, StripSide side,
                                    const TorusGrid& grid, double tol = kSectionTol);

struct SectionLyapunov {
  double tau_form = 0.0;  // mean ln |tau_A(m)|
  double q_form = 0.0;    // mean -(1/2) ln q
};

/// Both quadratures for a forward section.
SectionLyapunov section_lyapunov(const StripCocycle& s, const DiskSection& m);

struct KotaniIntegrals {
  double i_plus = 0.0;
  double i_minus = 0.0;
  double d2 = 0.0;
};

KotaniIntegrals kotani_integrals(const DiskSection& plus, const DiskSection& minus);

struct KotaniProbe {
  double t = 0.0;
  KotaniIntegrals values;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
};

/// Sections at sigma +- i t on a certified strip and their integrals.
std::vector<KotaniProbe> kotani_profile(const StripCocycle& s, double sigma, const std::vector<double>& levels,
                                        const TorusGrid& grid);

struct UProfile {
  std::vector<double> levels;
  std::vector<double> u;          // sigma-average of the tau-form L
  std::vector<double> u_q;        // same with the q-form
  std::vector<double> epsilon_hat;  // measured contraction exponent per level
  std::vector<double> min_section_l;  // smallest per-sigma L per level
  double max_residual = 0.0;
  AffineFit fit;
  double relative_residual = 0.0;  // fit.max_residual / |u at the top level|
};

/// U(t) at each level on the certified side of s.
UProfile u_profile(const StripCocycle& s, const std::vector<double>& levels, const std::vector<double>& sigmas,
                   const TorusGrid& grid);

struct SecondDerivative {
  std::vector<double> levels;
  std::vector<double> values;  // (2 / t^2) * theta-average of ln((|e^{ts}| + |e^{ts}|^{-1}) / 2)
  double richardson = 0.0;     // 2 v(t/2) - v(t) from the last two levels
};

/// s1, s2, s3 over the circle; levels ordered with the last two as (t, t/2).
/// The rotation factor R_{<l,x>} drops out of the average, so l is not needed.
SecondDerivative second_derivative_limit(const TrigPoly& s1, const TrigPoly& s2, const TrigPoly& s3,
                                         const std::vector<double>& levels, int theta_nodes = 4096);

struct DerivativeBound {
  double lyapunov = 0.0;     // L at theta*
  double drho = 0.0;         // central difference of the lifted rho
  double tolerance = 0.0;    // z-dependence of the difference quotient
  double threshold = 0.0;    // |epsilon| / 2 pi
  MonotoneStatus monotone = MonotoneStatus::Uncertified;
  bool passes = false;       // |drho| >= threshold - tolerance
};

/// Throws NotAtZeroEnergy when L(A_theta*) >= 1e-3.
DerivativeBound derivative_bound_check(const Family& f, double theta_star, double h, const Eigen::VectorXd& x0,
                                       long n, const TorusGrid& xgrid);

inline constexpr double kZeroEnergyTol = 1e-3;

}  // namespace sl2lab
