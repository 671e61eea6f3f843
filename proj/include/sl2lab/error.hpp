#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sl2lab {

enum class Errc {
  InvalidArgument,
  PoleOnCircle,
  DegenerateTau,
  UnwrapStep,
  BoundaryPoint,
  Overflow,
  NonIntegerWinding,
  IllConditioned,
  Undersampled,
  DetVanishes,
  NoContraction,
  SlowContraction,
  NotAtZeroEnergy,
  NoConvergence,
  AtomBlowup,
  RationalAlpha,
  CommutationResidual,
  ChartMiss,
  PeriodicityResidual,
  SmallDivisor,
  LatticeSearchFail,
  ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `code()` identifies the failing
/// precondition; `detail()` carries optional integer payload (offending
/// Fourier modes for SmallDivisor, for instance).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::vector<long> detail = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        detail_(std::move(detail)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<long>& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::vector<long> detail_;
};

}  // namespace sl2lab
