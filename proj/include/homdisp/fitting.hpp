#pragma once

#include <cstdint>
#include <optional>

#include "homdisp/experiment.hpp"

namespace homdisp {

/// y(tau) = baseline * (1 - visibility * exp(-(tau - center)^2 / (2 sigma^2)))
struct DipModel {
  double baseline = 0;
  double visibility = 0;
  double center_ps = 0;
  double sigma_ps = 0;

  double operator()(double tau_ps) const;
  double fwhm_ps() const;
};

struct FitResult {
  DipModel estimate;     ///< direct fit, or Monte-Carlo mean
  DipModel uncertainty;  ///< 1 sigma per parameter
  double fwhm_ps = 0;
  double fwhm_uncertainty_ps = 0;
  DipModel direct;  ///< least-squares fit to the data as given
  int n_mc_trials = 0;  ///< 0 for a plain fit (covariance uncertainties)
  int mc_failures = 0;
  bool uncertainties_defined = true;
  int iterations = 0;
  double residual_norm = 0;  ///< weighted, sqrt(chi^2)
  double chi2_reduced = 0;
  std::size_t n_points = 0;
};

inline constexpr int kFitIterationCap = 200;
inline constexpr double kFitRelativeStep = 1e-10;

/// Levenberg-Marquardt least squares of DipModel. Weights are 1/max(y, 1)
/// (Poisson). Uncertainties come from the scaled covariance.
/// Throws InvalidArgument (< 6 points, bad data), NonConvergence (iteration
/// cap), DipNotFound (visibility below 3 of its sigma, or center off the grid).
FitResult fit_gaussian_dip(const HomCurve& curve, const std::optional<DipModel>& initial_guess = std::nullopt);

/// Self-initialization: (max, 1 - min/max, argmin, span/6).
DipModel initial_guess_for(const HomCurve& curve);

/// Parametric bootstrap: each trial redraws every point from Poisson(count)
/// and refits. Reports the mean and standard deviation per parameter. Curves
/// without counts are refit unchanged (zero spread). threads == 0 picks the
/// hardware concurrency; the result does not depend on it.
FitResult monte_carlo_fit(const HomCurve& curve, int trials = 1000, std::uint64_t seed = 0,
                          unsigned threads = 0);

/// Source FWHM from a dispersion-free dip: d / sqrt(2).
double pulse_width_from_dip(double dip_fwhm_ps);

struct DispersionEstimate {
  double alpha_ps2 = 0;
  double beta2_ps2_per_km = 0;  ///< magnitude; the sign is not observable
  double d_ps_per_nm_km = 0;    ///< magnitude
  double alpha_sigma = 0;       ///< combined
  double beta2_sigma = 0;
  double d_sigma = 0;
  double d_sigma_from_width = 0;  ///< dip-width uncertainty alone
  double d_sigma_from_t0 = 0;     ///< T0 uncertainty alone
  bool near_boundary = false;     ///< dip within 1 sigma of the dispersion-free floor
  int boundary_hits = 0;          ///< MC draws that fell below the floor (alpha set to 0)
  int mc_trials = 0;
  double dip_fwhm_ps = 0;
  double dip_fwhm_sigma_ps = 0;
  double t0_ps = 0;
  double t0_sigma_ps = 0;
  double length_m = 0;
  double wavelength_nm = 0;
};

/// Relative slack below the dispersion-free floor still read as alpha = 0 when
/// the dip width carries no uncertainty (fit round-off).
inline constexpr double kFloorTolerance = 1e-6;

/// alpha from the dip width, beta2 = alpha / L, D from beta2. Uncertainties by
/// Monte-Carlo over independent Gaussian (d, T0).
/// A width below the floor for T0 by at most max(sigma_d, kFloorTolerance *
/// floor) gives alpha = 0; further below throws InfeasibleWidth.
DispersionEstimate dispersion_from_dip(double dip_fwhm_ps, double dip_fwhm_sigma_ps, double t0_ps,
                                       double t0_sigma_ps, double length_m, double wavelength_nm,
                                       int mc_trials = 1000, std::uint64_t seed = 0);

}  // namespace homdisp
