#include "sl2lab/spectral.hpp"

#include <unsupported/Eigen/FFT>

namespace sl2lab {

namespace {

/// Multiplier for mode index i of an axis of length n under a shift s.
Complex mode_factor(std::size_t i, std::size_t n, double s) {
  const long k = static_cast<long>(i) <= static_cast<long>(n / 2) ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
  if (n % 2 == 0 && i == n / 2) return Complex(std::cos(kTwoPi * static_cast<double>(k) * s), 0.0);
  return std::polar(1.0, kTwoPi * static_cast<double>(k) * s);
}

}  // namespace

std::vector<Complex> periodic_shift(const std::vector<Complex>& values, const std::vector<int>& shape,
                                    const Eigen::VectorXd& shift) {
  std::size_t total = 1;
  for (int n : shape) {
    if (n < 1) throw Error(Errc::InvalidArgument, "grid axes need at least one node");
    total *= static_cast<std::size_t>(n);
  }
  if (total != values.size() || shift.size() != static_cast<Eigen::Index>(shape.size()))
    throw Error(Errc::InvalidArgument, "sample count does not match the grid shape");
  std::vector<Complex> out = values;
  Eigen::FFT<double> fft;
  std::size_t stride = 1;
  for (int axis = static_cast<int>(shape.size()) - 1; axis >= 0; --axis) {
    const auto n = static_cast<std::size_t>(shape[static_cast<std::size_t>(axis)]);
    const double s = shift[axis];
    if (s != 0.0 && n > 1) {
      std::vector<Complex> factor(n);
      for (std::size_t i = 0; i < n; ++i) factor[i] = mode_factor(i, n, s);
      std::vector<Complex> line(n), spec(n);
      for (std::size_t base = 0; base < total; ++base) {
        if ((base / stride) % n != 0) continue;
        for (std::size_t i = 0; i < n; ++i) line[i] = out[base + i * stride];
        fft.fwd(spec, line);
        for (std::size_t i = 0; i < n; ++i) spec[i] *= factor[i];
        fft.inv(line, spec);
        for (std::size_t i = 0; i < n; ++i) out[base + i * stride] = line[i];
      }
    }
    stride *= n;
  }
  return out;
}

std::vector<Complex> fourier_coefficients(const std::vector<Complex>& values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "no samples");
  Eigen::FFT<double> fft;
  std::vector<Complex> in = values, spec;
  fft.fwd(spec, in);
  const double n = static_cast<double>(values.size());
  for (auto& c : spec) c /= n;
  return spec;
}

Complex trig_interpolate(const std::vector<Complex>& values, double u) {
  const auto c = fourier_coefficients(values);
  const std::size_t n = c.size();
  Complex sum(0.0);
  for (std::size_t i = 0; i < n; ++i) sum += c[i] * mode_factor(i, n, u);
  return sum;
}

}  // namespace sl2lab
