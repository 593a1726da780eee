#pragma once

#include <complex>
#include <span>
#include <vector>

namespace homdisp::fourier {

using Complex = std::complex<double>;

/// Discrete Fourier sum on index sets centered about zero:
///
///   y_j = sum_k x_k exp(sign * i * 2 pi (k - c)(j - c) / N),  c = (N - 1) / 2.
///
/// With the symmetric frequency/time grids used throughout the library this
/// is exactly the Riemann sum of a continuous Fourier integral up to the
/// constant factor (grid spacing / sqrt(2 pi)), which callers apply.
/// `sign` must be +1 or -1. Thread-safe.
std::vector<Complex> centered_dft(std::span<const Complex> x, int sign);

}  // namespace homdisp::fourier
