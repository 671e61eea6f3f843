#pragma once

// Constructive conjugacies: the conjugacy to rotations built from a disk-valued
// invariant section, the Fourier solution of the cohomological equation, and
// conjugation of rotation-valued cocycles toward their homotopy model.

#include <vector>

#include "sl2lab/cocycle.hpp"
#include "sl2lab/grid.hpp"
#include "sl2lab/section.hpp"
#include "sl2lab/trig_poly.hpp"

namespace sl2lab {

inline constexpr double kDivisorCut = 1e-6;
inline constexpr double kCohomologicalTol = 1e-9;
inline constexpr int kLatticeBox = 10000;
/// Lattice points examined at most (the box shrinks with the dimension).
inline constexpr long kLatticeBudget = 4000000;

struct ConjugacyField {
  TorusGrid grid;
  std::vector<Mat2R> values;
  /// Sup over nodes of the distance of B(x + alpha) A(x) B(x)^{-1} to the target class.
  double quality = 0.0;
};

struct L2Conjugacy {
  ConjugacyField field;
  /// Max hyperbolic distance between m(x + alpha) and A(x).m(x).
  double section_residual = 0.0;
  /// quality <= 10 * section_residual (+ rounding floor 1e-12).
  bool verified = false;
};

/// B with disk form (1 - |m|^2)^{-1/2} [[1, -m], [-conj(m), 1]] (sending m to 0),
/// pulled back to SL(2,R). Quality is max |sigma_i^2 - 1| of the conjugated
/// real cocycle; m(x + alpha) comes from trigonometric interpolation on the
/// uniform tensor grid.
L2Conjugacy l2_conjugacy_from_section(const Cocycle& c, const TorusGrid& grid, const std::vector<Complex>& m);
L2Conjugacy l2_conjugacy_from_section(const Cocycle& c, const DiskSection& m);

/// Disk form of the conjugacy at a single point.
Mat2R section_conjugacy(Complex m);

struct CohomologicalSolution {
  TrigPoly psi;
  double c = 0.0;
  /// sup |phi(x) + psi(x + alpha) - psi(x) - c| on the verification grid.
  double residual = 0.0;
};

/// phi(x) = -psi(x + alpha) + psi(x) + c for the periodic part of real phi:
/// psi_k = phi_k / (1 - e^{2 pi i <k, alpha>}). Throws SmallDivisor with the
/// flattened offending modes when |1 - e^{2 pi i <k, alpha>}| < cut.
CohomologicalSolution solve_cohomological(const TrigPoly& phi, const Eigen::VectorXd& alpha,
                                          double divisor_cut = kDivisorCut);

struct LatticeHit {
  std::vector<int> l;
  double error = 0.0;  // distance of <l, alpha> - c to Z
};

/// Smallest l (sup norm, then lexicographic) with dist(<l, alpha> - c, Z) <= tol
/// in the box |l_j| <= box (reduced so the search stays within kLatticeBudget).
LatticeHit lattice_search(const Eigen::VectorXd& alpha, double c, double tol, int box = kLatticeBox);

struct PushOptions {
  int stages = 3;
  /// Stage s (1-based) keeps modes |k_j| <= max_modes[s-1] and needs lattice
  /// error <= tolerances[s-1]; defaults: s and 10^{-s}.
  std::vector<int> max_modes;
  std::vector<double> tolerances;
  double divisor_cut = kDivisorCut;
  int verification_nodes = 1024;
};

struct PushStage {
  int stage = 0;
  int max_mode = 0;
  std::vector<int> l;
  double lattice_error = 0.0;
  TrigPoly psi;
  double cohomological_residual = 0.0;
  /// Sup distance of the conjugated cocycle to [A] (operator norm of the difference).
  double distance = 0.0;
  ConjugacyField field;
};

/// Phase of a rotation-valued expression: A(x) = R_{phase(x)}. Throws
/// InvalidArgument for other expressions.
TrigPoly rotation_phase(const CocycleExpr& e);

/// Stage 0 is the input; stages 1..S conjugate by R_{-<l_s, x>} R_{psi_s(x)}.
std::vector<PushStage> push_to_model(const Cocycle& c, const PushOptions& opt = {});

}  // namespace sl2lab
