#pragma once

// Trigonometric interpolation of periodic samples on uniform tensor grids.
// Grid ordering is row-major with the last axis fastest (as in TorusGrid).
// The Nyquist mode of an even axis is split evenly between +N/2 and -N/2.

#include <Eigen/Core>
#include <vector>

#include "sl2lab/algebra.hpp"

namespace sl2lab {

/// Values of the trigonometric interpolant at every node shifted by `shift`.
std::vector<Complex> periodic_shift(const std::vector<Complex>& values, const std::vector<int>& shape,
                                    const Eigen::VectorXd& shift);

/// Interpolant of 1-periodic samples f(j / n), evaluated at a real point u.
Complex trig_interpolate(const std::vector<Complex>& values, double u);

/// Discrete Fourier coefficients c_k, k = -n/2 .. (n-1)/2, of 1-periodic samples,
/// stored at index k mod n.
std::vector<Complex> fourier_coefficients(const std::vector<Complex>& values);

}  // namespace sl2lab
