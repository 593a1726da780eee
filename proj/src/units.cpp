#include "homdisp/units.hpp"

#include <cmath>

namespace homdisp::units {

double gaussian_fwhm_factor() { return 2.0 * std::sqrt(std::log(2.0)); }

double t0_to_fwhm(double t0) { return gaussian_fwhm_factor() * t0; }

double fwhm_to_t0(double fwhm) { return fwhm / gaussian_fwhm_factor(); }

double angular_frequency(double wavelength_nm) {
  return 2.0 * kPi * kSpeedOfLight / wavelength_nm;
}

// |dlambda| = lambda^2 / (2 pi c) |domega|
double angular_width_to_wavelength_width(double width_rad_per_ps, double wavelength_nm) {
  return wavelength_nm * wavelength_nm * width_rad_per_ps / (2.0 * kPi * kSpeedOfLight);
}

double wavelength_width_to_angular_width(double width_nm, double wavelength_nm) {
  return width_nm * 2.0 * kPi * kSpeedOfLight / (wavelength_nm * wavelength_nm);
}

}  // namespace homdisp::units
