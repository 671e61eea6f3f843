#include "sl2lab/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sl2lab {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::PoleOnCircle: return "PoleOnCircle";
    case Errc::DegenerateTau: return "DegenerateTau";
    case Errc::UnwrapStep: return "UnwrapStep";
    case Errc::BoundaryPoint: return "BoundaryPoint";
    case Errc::Overflow: return "Overflow";
    case Errc::NonIntegerWinding: return "NonIntegerWinding";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::Undersampled: return "Undersampled";
    case Errc::DetVanishes: return "DetVanishes";
    case Errc::NoContraction: return "NoContraction";
    case Errc::SlowContraction: return "SlowContraction";
    case Errc::NotAtZeroEnergy: return "NotAtZeroEnergy";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::AtomBlowup: return "AtomBlowup";
    case Errc::RationalAlpha: return "RationalAlpha";
    case Errc::CommutationResidual: return "CommutationResidual";
    case Errc::ChartMiss: return "ChartMiss";
    case Errc::PeriodicityResidual: return "PeriodicityResidual";
    case Errc::SmallDivisor: return "SmallDivisor";
    case Errc::LatticeSearchFail: return "LatticeSearchFail";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

PhaseLift phase_unwrap(std::span<const Complex> seq) {
  PhaseLift lift;
  if (seq.empty()) return lift;
  lift.values.reserve(seq.size());
  double first = std::arg(seq[0]) / kTwoPi;
  if (first < 0.0) first += 1.0;
  if (first >= 1.0) first -= 1.0;
  lift.values.push_back(first);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (seq[k] == Complex(0.0) || seq[k - 1] == Complex(0.0))
      throw Error(Errc::InvalidArgument, "phase_unwrap needs nonzero samples");
    const double step = phase_step(seq[k - 1], seq[k]);
    if (std::abs(step) >= kUnwrapThreshold)
      throw Error(Errc::UnwrapStep, "consecutive phase jump of " + std::to_string(step) + " revolutions at index " +
                                        std::to_string(k));
    lift.values.push_back(lift.values.back() + step);
  }
  return lift;
}

Complex repair_determinant(Mat2C& m, Complex previous_factor) {
  const Complex det = m.determinant();
  if (!std::isfinite(det.real()) || !std::isfinite(det.imag()) || det == Complex(0.0)) return previous_factor;
  Complex factor = Complex(1.0) / std::sqrt(det);
  if (std::abs(-factor - previous_factor) < std::abs(factor - previous_factor)) factor = -factor;
  m *= factor;
  return factor;
}

Polar polar_decompose(const Mat2R& a) {
  if (!a.allFinite() || a.determinant() <= 0.0)
    throw Error(Errc::ChartMiss, "polar decomposition needs a finite matrix with positive determinant");
  Polar out;
  out.angle = std::atan2(a(1, 0) - a(0, 1), a(0, 0) + a(1, 1)) / kTwoPi;
  Mat2R p = rotation(-out.angle) * a;
  out.positive = 0.5 * (p + p.transpose());
  return out;
}

Mat2R symmetric_log(const Mat2R& p) {
  Eigen::SelfAdjointEigenSolver<Mat2R> es(p);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw Error(Errc::ChartMiss, "symmetric_log needs a positive definite matrix");
  return es.eigenvectors() * ev.array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
}

Mat2R symmetric_exp(const Mat2R& s) {
  Eigen::SelfAdjointEigenSolver<Mat2R> es(0.5 * (s + s.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace sl2lab
