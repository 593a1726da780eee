#pragma once

// Unit system: time in ps, wavelength in nm, fiber length in m (km where a
// dispersion coefficient is quoted per km), angular frequency in rad/ps.

namespace homdisp::units {

inline constexpr double kPi = 3.14159265358979323846;

/// Vacuum speed of light in nm/ps.
inline constexpr double kSpeedOfLight = 299792.458;

inline constexpr double kMetersPerKm = 1000.0;

inline double meters_to_km(double meters) { return meters / kMetersPerKm; }

/// FWHM of a Gaussian intensity exp(-t^2/T0^2) in units of T0: 2 sqrt(ln 2).
double gaussian_fwhm_factor();

/// Gaussian 1/e amplitude half-width T0 -> intensity FWHM.
double t0_to_fwhm(double t0);
double fwhm_to_t0(double fwhm);

/// Carrier angular frequency (rad/ps) for a vacuum wavelength in nm.
double angular_frequency(double wavelength_nm);

/// Converts an angular-frequency width (rad/ps) into a wavelength width (nm)
/// around `wavelength_nm`, to first order.
double angular_width_to_wavelength_width(double width_rad_per_ps, double wavelength_nm);
double wavelength_width_to_angular_width(double width_nm, double wavelength_nm);

}  // namespace homdisp::units
