#pragma once

// Conformal barycenter of finitely supported probability measures on the disk,
// by iterated self-pairing under the hyperbolic midpoint.

#include <vector>

#include "sl2lab/algebra.hpp"

namespace sl2lab {

inline constexpr double kWeightSumTol = 1e-12;
/// Atoms closer than this (pseudo-hyperbolic) are merged by pair_measures and
/// after each exact-mode pairing.
inline constexpr double kAtomMergeRadius = 1e-9;
/// Weights below this are folded into their nearest atom.
inline constexpr double kAtomPruneWeight = 1e-15;
/// Exact mode reports AtomBlowup above this count.
inline constexpr std::size_t kAtomHardCap = 4096;
/// Canonical-frame coordinates are rounded to multiples of 2^-40.
inline constexpr int kFrameSnapBits = 40;
/// Working cap for the lossy compaction.
inline constexpr std::size_t kAtomWorkingCap = 256;

struct DiskAtom {
  Complex z;
  double weight = 0.0;
};

struct DiskMeasure {
  std::vector<DiskAtom> atoms;

  /// Validates |z| < 1 and weights >= 0, rescales to total 1 (sum must be positive).
  static DiskMeasure normalized(std::vector<DiskAtom> atoms);
  double total_weight() const;
  /// Image under z -> M.z (M in disk coordinates).
  DiskMeasure pushed(const Mat2C& m) const;
};

/// Pseudo-hyperbolic distance |z - w| / |1 - conj(w) z|.
double pseudo_distance(Complex z, Complex w);

/// Midpoint of the geodesic from z to w; z * z = z.
Complex hyperbolic_midpoint(Complex z, Complex w);
/// Point on the geodesic from z to w at hyperbolic-length fraction s in [0, 1].
Complex geodesic_point(Complex z, Complex w, double s);

/// Phi(mu) = sum w / (1 - |z|^2).
double phi(const DiskMeasure& mu);

/// Pushforward of mu x nu under the midpoint, followed by merging atoms within
/// kAtomMergeRadius and folding weights below kAtomPruneWeight. Canonical atom order.
DiskMeasure pair_measures(const DiskMeasure& mu, const DiskMeasure& nu);

/// Hyperbolic (atanh-metric) diameter of the support.
double hyperbolic_diameter(const DiskMeasure& mu);

/// sum w d(z, center)^2 in the atanh metric.
double hyperbolic_variance(const DiskMeasure& mu, Complex center);

/// The zero of c -> sum w (z - c) / (1 - conj(c) z); Moebius equivariant.
Complex douady_earle_center(const DiskMeasure& mu);

struct BarycenterOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  /// Keep at most `cap` atoms by merging nearest-neighbour components at their
  /// hyperboloid centroids; off means exact pairing with AtomBlowup above kAtomHardCap.
  bool lossy = true;
  std::size_t cap = kAtomWorkingCap;
};

struct BarycenterResult {
  Complex point;
  int iterations = 0;
  double diameter = 0.0;
  double variance = 0.0;  // about the returned point (hyperboloid centroid of the last measure)
  std::vector<double> phi_trace;  // Phi(mu^(k)), k = 0..iterations
  std::vector<std::size_t> atom_counts;
  bool phi_monotone = true;       // nonincreasing within 1e-12 (relative)
};

BarycenterResult conformal_barycenter(const DiskMeasure& mu, const BarycenterOptions& opt = {});

}  // namespace sl2lab
