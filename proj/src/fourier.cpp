#include "homdisp/fourier.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "homdisp/units.hpp"

namespace homdisp::fourier {
namespace {

// FFTW planning is not re-entrant; execution with fftw_execute_dft is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// exp(i * pi * numerator / denominator), evaluated after exact integer reduction.
Complex phase_pi(std::uint64_t numerator, std::uint64_t denominator, int sign) {
  const std::uint64_t reduced = numerator % (2 * denominator);
  const double angle = sign * units::kPi * static_cast<double>(reduced) /
                       static_cast<double>(denominator);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

std::vector<Complex> centered_dft(std::span<const Complex> x, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("centered_dft: sign must be +1 or -1");
  const std::size_t n = x.size();
  std::vector<Complex> in(n), out(n);
  if (n == 0) return out;

  const auto nn = static_cast<std::uint64_t>(n);
  // exp(-sign i 2 pi c k / N) = exp(-sign i pi (N-1) k / N)
  for (std::size_t k = 0; k < n; ++k) {
    in[k] = x[k] * phase_pi((nn - 1) * k, nn, -sign);
  }

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()),
                            sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  // exp(sign i 2 pi c^2 / N) = exp(sign i pi (N-1)^2 / (2N))
  const Complex global = phase_pi((nn - 1) * (nn - 1), 2 * nn, sign);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] *= phase_pi((nn - 1) * j, nn, -sign) * global;
  }
  return out;
}

}  // namespace homdisp::fourier
