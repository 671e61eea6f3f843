#pragma once

// Extensions of cocycle families into a strip of complex parameters, and the
// certification of strips on which the extension contracts the unit disk.
//
// Strip levels are magnitudes t > 0; the side says which half-plane.
// theta = sigma + i * sign(side) * t.

#include <functional>
#include <optional>
#include <vector>

#include "sl2lab/family.hpp"
#include "sl2lab/grid.hpp"

namespace sl2lab {

/// Quadrature nodes over the kernel support (trapezoid; converged to 1e-16 for the bump).
inline constexpr int kKernelQuadNodes = 1024;
inline constexpr double kKernelConditionMax = 1e12;
/// Sample spectra must decay to this fraction of their peak before the Nyquist band.
inline constexpr double kSpectralTailTol = 1e-10;
inline constexpr double kDetVanishTol = 1e-6;
inline constexpr double kContainmentMargin = 1e-10;

/// K(x) = p(x) * bump(x / halfwidth), bump(u) = exp(-1 / (1 - u^2)) on |u| < 1,
/// with p of degree floor(eta + 1) chosen so that int x^k K = i^k for
/// k = 0..floor(eta + 1). Odd/even decoupling makes K(-x) = conj K(x).
struct AHKernel {
  double eta = 1.0;
  double halfwidth = 1.0;
  int order = 2;                  // floor(eta + 1)
  std::vector<Complex> poly;      // p coefficients, ascending powers
  std::vector<double> nodes;      // quadrature nodes on (-halfwidth, halfwidth)
  std::vector<Complex> samples;   // K at nodes
  std::vector<double> moment_residuals;  // |int x^k K - i^k|, k = 0..order
  double condition = 0.0;         // 2-norm condition number of the moment system

  Complex operator()(double x) const;
  /// int K(x) x^j e^{2 pi i xi x} dx for j = 0, 1.
  Complex transform(double xi, int j = 0) const;
};

AHKernel ah_kernel(double eta, double halfwidth = 1.0);

/// Fourier modes of 1-periodic samples f(j / n), negligible modes dropped. The
/// Nyquist mode of even n is split between +n/2 and -n/2. Throws Undersampled
/// when modes with |k| > n/4 exceed kSpectralTailTol relative to the peak.
struct ScalarSpectrum {
  std::vector<std::pair<double, Complex>> modes;  // (k, c_k)

  static ScalarSpectrum from_samples(const Eigen::VectorXd& samples);
  Complex extend(const AHKernel& k, Complex z) const;
  Complex dbar(const AHKernel& k, Complex z) const;
};

/// Phi(f)(sigma + i t) = int K(x) f(sigma + t x) dx for the trigonometric interpolant
/// of the 1-periodic samples f(j / n). Throws Undersampled when the sample spectrum
/// is not resolved.
Complex ah_extend_scalar(const Eigen::VectorXd& samples, const AHKernel& k, Complex z);
/// dbar Phi(f) = (d_sigma + i d_t) / 2 at z, computed in closed form from the same data.
Complex ah_dbar(const Eigen::VectorXd& samples, const AHKernel& k, Complex z);

/// Entries a, b, c, d of a 1-periodic SL(2,R)-valued function sampled at j / n.
struct SampledMatrix {
  Eigen::VectorXd a, b, c, d;

  static SampledMatrix from_function(int n, const std::function<Mat2R(double)>& f);
  Eigen::Index size() const { return a.size(); }
};

Mat2C ah_extend_matrix(const std::vector<ScalarSpectrum>& abcd, const AHKernel& k, Complex z);
/// (Phi(a) Phi(d) - Phi(b) Phi(c))^{-1/2} [[Phi(a), Phi(b)], [Phi(c), Phi(d)]], with the
/// root continued along sigma + i s t, s: 0 -> 1, from the value 1 at t = 0.
Mat2C ah_extend_matrix(const SampledMatrix& m, const AHKernel& k, Complex z);

enum class ExtensionMode { Analytic, AH };
enum class StripSide { Upper, Lower };

inline double side_sign(StripSide s) { return s == StripSide::Upper ? 1.0 : -1.0; }
const char* side_name(StripSide s);

/// A family theta -> A_theta over x -> x + alpha, extended to complex theta.
///   Analytic: the expression tree evaluated at complex theta.
///   AH:       the theta-dependence sampled on a periodic grid and extended by the kernel.
///   Sampled:  A given by samples (d = 1) with A_theta(x) = A(x + theta), extended by the kernel.
class StripCocycle {
 public:
  static StripCocycle analytic(Family f);
  /// Needs a theta-periodic family (RotTwist, or PhaseShift with integer w).
  static StripCocycle ah(Family f, AHKernel k, int theta_samples);
  static StripCocycle sampled(Eigen::VectorXd alpha, const SampledMatrix& entries, AHKernel k);

  ExtensionMode mode() const { return mode_; }
  int dim() const { return static_cast<int>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const std::optional<Family>& family() const { return family_; }

  /// A_theta(x) in original coordinates.
  Mat2C eval(const Eigen::VectorXd& x, Complex theta) const;
  Mat2C eval_at_level(const Eigen::VectorXd& x, double sigma, double t, StripSide side) const {
    return eval(x, Complex(sigma, side_sign(side) * t));
  }

  /// Certified strip, if any.
  double delta = 0.0;
  StripSide side = StripSide::Lower;
  bool certified = false;

 private:
  ExtensionMode mode_ = ExtensionMode::Analytic;
  Eigen::VectorXd alpha_;
  std::optional<Family> family_;
  std::vector<ScalarSpectrum> entries_;  // a, b, c, d
  std::optional<AHKernel> kernel_;
  int theta_samples_ = 0;
};

/// A sampled cocycle over x -> x + alpha (d = 1),
/// phase-complexified.
StripCocycle ah_extend_cocycle(const SampledMatrix& m, const AHKernel& k, const Eigen::VectorXd& alpha);

struct LevelProbe {
  double t = 0.0;
  bool contracts = false;
  double worst = 0.0;        // max over nodes of |center| + radius of the image disk
  double epsilon_hat = 0.0;  // -ln(worst) / (2 t)
};

struct StripReport {
  double delta = 0.0;
  StripSide side = StripSide::Lower;
  std::vector<LevelProbe> probes;  // on the contracting side, descending t
  double epsilon_hat = 0.0;        // at delta
};

/// Image-disk containment of every node at level t on one side.
LevelProbe probe_level(const StripCocycle& s, double t, StripSide side, const std::vector<double>& sigmas,
                       const TorusGrid& xgrid);

/// Largest dyadic t = tmax / 2^j (j <= max_halvings) at which every node contracts.
/// Throws NoContraction if neither side contracts at the smallest probe.
StripReport strip_width(const StripCocycle& s, double tmax, const std::vector<double>& sigmas, const TorusGrid& xgrid,
                        int max_halvings = 16);

/// strip_width plus recording the certificate on a copy of s.
StripCocycle certify_strip(StripCocycle s, double tmax, const std::vector<double>& sigmas, const TorusGrid& xgrid,
                           StripReport* report = nullptr);

}  // namespace sl2lab
