#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace homdisp {

using Complex = std::complex<double>;

/// Phase convention for the quadratic term of the propagation constant.
/// A medium of length L with GVD beta2 imprints exp(i * kQuadraticPhaseFactor *
/// beta2 * L * Omega^2). With this factor the quadrature of the overlap
/// integral reproduces the closed-form dip (see hom_core.hpp) when
/// alpha = beta2_A L_A - beta2_B L_B.
inline constexpr double kQuadraticPhaseFactor = 0.5;
inline constexpr double kCubicPhaseFactor = 1.0 / 6.0;

/// Transform-limited Gaussian wave-packet,
/// alpha(t) = sqrt(N) (T0 sqrt(pi))^{-1/2} exp(-t^2 / 2 T0^2).
struct GaussianPulse {
  double t0_ps = 1.0;                  ///< 1/e amplitude half-width T0
  double center_wavelength_nm = 1565.0;
  double mean_photon_number = 1.0;
  double source_g2 = 1.0;              ///< g2(0) of the source; 1 for coherent states

  static GaussianPulse from_fwhm(double fwhm_ps, double center_wavelength_nm = 1565.0,
                                 double mean_photon_number = 1.0, double source_g2 = 1.0);

  double fwhm_ps() const;
  /// Intensity FWHM of the spectrum expressed in wavelength (nm).
  double spectral_fwhm_nm() const;

  /// Throws InvalidArgument on t0 <= 0, negative photon number or g2.
  void validate() const;
};

/// Uniform angular-frequency grid (detuning from the carrier), symmetric about
/// zero: Omega_k = (k - (n-1)/2) * spacing, spacing = span / n.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n_points, double span_rad_per_ps);

  /// Default sampling for a pulse of half-width t0: 4096 points, span 16/t0.
  static FrequencyGrid for_pulse(double t0_ps);

  std::size_t size() const { return n_; }
  double span() const { return span_; }
  double spacing() const { return span_ / static_cast<double>(n_); }
  double omega(std::size_t k) const;

  /// Conjugate time grid: t_j = (j - (n-1)/2) * time_step, time_step = 2 pi / span.
  double time_step() const;
  double time_window() const;
  double time(std::size_t j) const;

  bool operator==(const FrequencyGrid&) const = default;

 private:
  std::size_t n_;
  double span_;
};

/// Sampled complex spectral envelope alpha(Omega) with
/// sum |alpha_k|^2 * spacing = mean photon number.
struct SpectralAmplitude {
  FrequencyGrid grid;
  std::vector<Complex> values;
  double center_wavelength_nm = 1565.0;

  double photon_number() const;
};

/// A single dispersive medium, with the propagation constant expanded to
/// third order about the carrier. Only the first two orders enter the
/// closed-form dip; beta3 is honoured by the quadrature route.
struct DispersiveElement {
  double length_m = 0.0;
  double beta1_ps_per_m = 0.0;        ///< inverse group velocity
  double beta2_ps2_per_km = 0.0;      ///< group-velocity dispersion
  double beta3_ps3_per_km = 0.0;

  /// Builds an element from the dispersion parameter D (ps/(nm km)) quoted at
  /// `reference_wavelength_nm`.
  static DispersiveElement from_dispersion_parameter(double length_m, double beta1_ps_per_m,
                                                     double d_ps_per_nm_km,
                                                     double reference_wavelength_nm);

  double group_delay_ps() const { return beta1_ps_per_m * length_m; }
  double gdd_ps2() const;  ///< beta2 * L
  double tod_ps3() const;  ///< beta3 * L

  /// Spectral phase beyond the linear (group-delay) term.
  double excess_phase(double omega) const;
  double spectral_phase(double omega) const { return group_delay_ps() * omega + excess_phase(omega); }

  void validate() const;
};

/// Complex temporal envelope on the time grid conjugate to a FrequencyGrid.
struct TemporalField {
  FrequencyGrid grid;
  std::vector<Complex> values;
  double center_wavelength_nm = 1565.0;

  double time(std::size_t j) const { return grid.time(j); }
  double photon_number() const;
};

/// Time grid and intensity |alpha(t)|^2 in photons/ps.
struct TemporalProfile {
  std::vector<double> times_ps;
  std::vector<double> intensity;

  double time_step() const;
  double photon_number() const;
  /// FWHM of the main peak, with the half-maximum crossings located by
  /// quadratic interpolation of log-intensity.
  double fwhm() const;
  /// Intensity-weighted mean arrival time.
  double centroid() const;
};

/// Gaussian spectral amplitude sampled on `grid`.
/// Throws GridTooNarrow when grid.span() < 8 / t0.
SpectralAmplitude gaussian_spectral_amplitude(const GaussianPulse& pulse, const FrequencyGrid& grid);

/// Multiplies every sample by exp(i * sum_elements spectral_phase(Omega)).
SpectralAmplitude apply_dispersion(const SpectralAmplitude& spec,
                                   std::span<const DispersiveElement> chain);

/// Multiplies by exp(i * Omega * delay): shifts the envelope later by `delay_ps`.
SpectralAmplitude apply_delay(const SpectralAmplitude& spec, double delay_ps);

/// alpha(t) = (2 pi)^{-1/2} * integral dOmega alpha(Omega) exp(-i Omega t).
TemporalField to_temporal_field(const SpectralAmplitude& spec);
/// Inverse of to_temporal_field.
SpectralAmplitude to_spectral_amplitude(const TemporalField& field);

TemporalProfile to_temporal_profile(const SpectralAmplitude& spec);

/// Closed-form intensity FWHM of a Gaussian pulse after accumulating
/// beta2*L = `accumulated_gdd_ps2`: 2 sqrt(ln2) T0 sqrt(1 + (beta2 L / T0^2)^2).
double broadened_width_closed_form(double t0_ps, double accumulated_gdd_ps2);

/// beta2 = -D lambda^2 / (2 pi c), in ps^2/km for D in ps/(nm km) and lambda in nm.
double dispersion_parameter_to_beta2(double d_ps_per_nm_km, double wavelength_nm);
double beta2_to_dispersion_parameter(double beta2_ps2_per_km, double wavelength_nm);

/// Frequency grid able to represent a pulse of half-width t0 whose relative
/// group-delay spread reaches `max_delay_ps` and which has accumulated
/// |beta2 L| up to `max_gdd_ps2`, without wrap-around in the time window.
FrequencyGrid grid_for_propagation(double t0_ps, double max_delay_ps, double max_gdd_ps2,
                                   std::size_t min_points = 4096);

}  // namespace homdisp
