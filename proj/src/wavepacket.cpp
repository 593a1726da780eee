#include "homdisp/wavepacket.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "homdisp/error.hpp"
#include "homdisp/fourier.hpp"
#include "homdisp/units.hpp"

namespace homdisp {
namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw InvalidArgument(std::string(what) + " must be finite");
}

// Half-maximum crossing between samples `below` and `above` (adjacent),
// interpolating log-intensity through a third point on the `above` side.
double half_max_crossing(std::span<const double> t, std::span<const double> y, std::size_t below,
                         std::size_t above, double half) {
  const std::size_t third = above > below ? above + 1 : above - 1;
  const double t0 = t[below], t1 = t[above];
  const double y0 = y[below], y1 = y[above];
  const auto linear = [&] { return t0 + (half - y0) * (t1 - t0) / (y1 - y0); };
  if (third >= y.size() || y0 <= 0.0 || y1 <= 0.0 || y[third] <= 0.0) return linear();

  // ln y ~ a + b s + c s^2 with s = t - t0, through three samples.
  const double t2 = t[third];
  const double l0 = std::log(y0), l1 = std::log(y1), l2 = std::log(y[third]);
  const double s1 = t1 - t0, s2 = t2 - t0;
  const double d1 = (l1 - l0) / s1, d2 = (l2 - l0) / s2;
  const double c = (d2 - d1) / (s2 - s1);
  const double b = d1 - c * s1;
  const double target = std::log(half) - l0;
  if (std::abs(c) < 1e-300) return std::abs(b) > 0 ? t0 + target / b : linear();
  const double disc = b * b + 4.0 * c * target;
  if (disc < 0) return linear();
  const double sq = std::sqrt(disc);
  const double r1 = (-b + sq) / (2.0 * c), r2 = (-b - sq) / (2.0 * c);
  const double lo = std::min(0.0, s1), hi = std::max(0.0, s1);
  const double slack = 1e-9 * std::abs(s1);
  for (double r : {r1, r2}) {
    if (r >= lo - slack && r <= hi + slack) return t0 + r;
  }
  return linear();
}

// Peak height from a parabola through log-intensity at the maximum sample and
// its neighbours; exact for Gaussian peaks.
double interpolated_peak(std::span<const double> y, std::size_t peak) {
  if (peak == 0 || peak + 1 >= y.size() || y[peak - 1] <= 0 || y[peak + 1] <= 0) return y[peak];
  const double lm = std::log(y[peak - 1]), l0 = std::log(y[peak]), lp = std::log(y[peak + 1]);
  const double curvature = lm - 2.0 * l0 + lp;
  if (curvature >= 0) return y[peak];
  const double slope = 0.5 * (lp - lm);
  return std::exp(l0 - slope * slope / (2.0 * curvature));
}

}  // namespace

// --- GaussianPulse -----------------------------------------------------------

GaussianPulse GaussianPulse::from_fwhm(double fwhm_ps, double center_wavelength_nm,
                                       double mean_photon_number, double source_g2) {
  GaussianPulse p{units::fwhm_to_t0(fwhm_ps), center_wavelength_nm, mean_photon_number, source_g2};
  p.validate();
  return p;
}

double GaussianPulse::fwhm_ps() const { return units::t0_to_fwhm(t0_ps); }

// |alpha(Omega)|^2 ~ exp(-Omega^2 T0^2): FWHM 2 sqrt(ln 2) / T0 in rad/ps.
double GaussianPulse::spectral_fwhm_nm() const {
  return units::angular_width_to_wavelength_width(units::gaussian_fwhm_factor() / t0_ps,
                                                  center_wavelength_nm);
}

void GaussianPulse::validate() const {
  require_finite(t0_ps, "pulse t0");
  require_finite(center_wavelength_nm, "center wavelength");
  require_finite(mean_photon_number, "mean photon number");
  require_finite(source_g2, "source g2");
  if (t0_ps <= 0) throw InvalidArgument("pulse t0 must be > 0");
  if (center_wavelength_nm <= 0) throw InvalidArgument("center wavelength must be > 0");
  if (mean_photon_number < 0) throw InvalidArgument("mean photon number must be >= 0");
  if (source_g2 < 0) throw InvalidArgument("source g2 must be >= 0");
}

// --- FrequencyGrid -----------------------------------------------------------

FrequencyGrid::FrequencyGrid(std::size_t n_points, double span_rad_per_ps)
    : n_(n_points), span_(span_rad_per_ps) {
  if (n_points < 16) throw InvalidArgument("frequency grid needs at least 16 points");
  if (!(span_rad_per_ps > 0) || !std::isfinite(span_rad_per_ps))
    throw InvalidArgument("frequency grid span must be finite and > 0");
}

FrequencyGrid FrequencyGrid::for_pulse(double t0_ps) {
  if (!(t0_ps > 0)) throw InvalidArgument("pulse t0 must be > 0");
  return FrequencyGrid(4096, 16.0 / t0_ps);
}

double FrequencyGrid::omega(std::size_t k) const {
  return (static_cast<double>(k) - 0.5 * static_cast<double>(n_ - 1)) * spacing();
}

double FrequencyGrid::time_step() const { return 2.0 * units::kPi / span_; }

double FrequencyGrid::time_window() const { return time_step() * static_cast<double>(n_); }

double FrequencyGrid::time(std::size_t j) const {
  return (static_cast<double>(j) - 0.5 * static_cast<double>(n_ - 1)) * time_step();
}

double SpectralAmplitude::photon_number() const {
  double sum = 0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.spacing();
}

// --- DispersiveElement ---------------------------------------------------------

DispersiveElement DispersiveElement::from_dispersion_parameter(double length_m,
                                                               double beta1_ps_per_m,
                                                               double d_ps_per_nm_km,
                                                               double reference_wavelength_nm) {
  DispersiveElement e;
  e.length_m = length_m;
  e.beta1_ps_per_m = beta1_ps_per_m;
  e.beta2_ps2_per_km = dispersion_parameter_to_beta2(d_ps_per_nm_km, reference_wavelength_nm);
  e.validate();
  return e;
}

double DispersiveElement::gdd_ps2() const { return beta2_ps2_per_km * units::meters_to_km(length_m); }

double DispersiveElement::tod_ps3() const { return beta3_ps3_per_km * units::meters_to_km(length_m); }

double DispersiveElement::excess_phase(double omega) const {
  const double w2 = omega * omega;
  return kQuadraticPhaseFactor * gdd_ps2() * w2 + kCubicPhaseFactor * tod_ps3() * w2 * omega;
}

void DispersiveElement::validate() const {
  require_finite(length_m, "element length");
  require_finite(beta1_ps_per_m, "element beta1");
  require_finite(beta2_ps2_per_km, "element beta2");
  require_finite(beta3_ps3_per_km, "element beta3");
  if (length_m < 0) throw InvalidArgument("element length must be >= 0");
}

// --- temporal representations --------------------------------------------------

double TemporalField::photon_number() const {
  double sum = 0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.time_step();
}

double TemporalProfile::time_step() const {
  return times_ps.size() < 2 ? 0.0 : times_ps[1] - times_ps[0];
}

double TemporalProfile::photon_number() const {
  double sum = 0;
  for (double v : intensity) sum += v;
  return sum * time_step();
}

double TemporalProfile::centroid() const {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    num += times_ps[i] * intensity[i];
    den += intensity[i];
  }
  if (den <= 0) throw InvalidArgument("centroid of an empty profile");
  return num / den;
}

double TemporalProfile::fwhm() const {
  const std::size_t n = intensity.size();
  if (n < 3 || times_ps.size() != n) throw InvalidArgument("profile too short for a width");
  const auto peak = static_cast<std::size_t>(
      std::max_element(intensity.begin(), intensity.end()) - intensity.begin());
  if (!(intensity[peak] > 0)) throw InvalidArgument("profile has no positive peak");
  const double half = 0.5 * interpolated_peak(intensity, peak);

  std::size_t left = peak;
  while (left > 0 && intensity[left - 1] >= half) --left;
  std::size_t right = peak;
  while (right + 1 < n && intensity[right + 1] >= half) ++right;
  if (left == 0 || right + 1 == n) throw InvalidArgument("profile peak not contained in window");

  const double t_left = half_max_crossing(times_ps, intensity, left - 1, left, half);
  const double t_right = half_max_crossing(times_ps, intensity, right + 1, right, half);
  return t_right - t_left;
}

// --- operations -----------------------------------------------------------------

SpectralAmplitude gaussian_spectral_amplitude(const GaussianPulse& pulse, const FrequencyGrid& grid) {
  pulse.validate();
  if (grid.span() < 8.0 / pulse.t0_ps) {
    throw GridTooNarrow("frequency grid span " + std::to_string(grid.span()) +
                        " rad/ps is below 8/T0 = " + std::to_string(8.0 / pulse.t0_ps));
  }
  SpectralAmplitude spec{grid, std::vector<Complex>(grid.size()), pulse.center_wavelength_nm};
  if (pulse.mean_photon_number == 0) return spec;

  const double t0 = pulse.t0_ps;
  const double amplitude = std::sqrt(pulse.mean_photon_number * t0 / std::sqrt(units::kPi));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double w = grid.omega(k);
    spec.values[k] = amplitude * std::exp(-0.5 * w * w * t0 * t0);
  }
  // Pin the discrete norm to the declared photon number (truncation at the
  // grid edges is below 1e-7 for span >= 8/T0).
  const double scale = std::sqrt(pulse.mean_photon_number / spec.photon_number());
  for (auto& v : spec.values) v *= scale;
  return spec;
}

SpectralAmplitude apply_dispersion(const SpectralAmplitude& spec,
                                   std::span<const DispersiveElement> chain) {
  for (const auto& e : chain) e.validate();
  SpectralAmplitude out = spec;
  if (chain.empty()) return out;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double w = out.grid.omega(k);
    double phase = 0;
    for (const auto& e : chain) phase += e.spectral_phase(w);
    out.values[k] *= std::polar(1.0, phase);
  }
  return out;
}

SpectralAmplitude apply_delay(const SpectralAmplitude& spec, double delay_ps) {
  require_finite(delay_ps, "delay");
  SpectralAmplitude out = spec;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] *= std::polar(1.0, out.grid.omega(k) * delay_ps);
  }
  return out;
}

TemporalField to_temporal_field(const SpectralAmplitude& spec) {
  auto values = fourier::centered_dft(spec.values, -1);
  const double scale = spec.grid.spacing() / std::sqrt(2.0 * units::kPi);
  for (auto& v : values) v *= scale;
  return {spec.grid, std::move(values), spec.center_wavelength_nm};
}

SpectralAmplitude to_spectral_amplitude(const TemporalField& field) {
  auto values = fourier::centered_dft(field.values, +1);
  const double scale = field.grid.time_step() / std::sqrt(2.0 * units::kPi);
  for (auto& v : values) v *= scale;
  return {field.grid, std::move(values), field.center_wavelength_nm};
}

TemporalProfile to_temporal_profile(const SpectralAmplitude& spec) {
  const TemporalField field = to_temporal_field(spec);
  TemporalProfile profile;
  profile.times_ps.resize(field.values.size());
  profile.intensity.resize(field.values.size());
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    profile.times_ps[j] = field.time(j);
    profile.intensity[j] = std::norm(field.values[j]);
  }
  return profile;
}

double broadened_width_closed_form(double t0_ps, double accumulated_gdd_ps2) {
  if (!(t0_ps > 0)) throw InvalidArgument("T0 must be > 0");
  const double ratio = 2.0 * kQuadraticPhaseFactor * accumulated_gdd_ps2 / (t0_ps * t0_ps);
  return units::t0_to_fwhm(t0_ps) * std::sqrt(1.0 + ratio * ratio);
}

double dispersion_parameter_to_beta2(double d_ps_per_nm_km, double wavelength_nm) {
  if (!(wavelength_nm > 0)) throw InvalidArgument("wavelength must be > 0");
  return -d_ps_per_nm_km * wavelength_nm * wavelength_nm / (2.0 * units::kPi * units::kSpeedOfLight);
}

double beta2_to_dispersion_parameter(double beta2_ps2_per_km, double wavelength_nm) {
  if (!(wavelength_nm > 0)) throw InvalidArgument("wavelength must be > 0");
  return -beta2_ps2_per_km * 2.0 * units::kPi * units::kSpeedOfLight / (wavelength_nm * wavelength_nm);
}

FrequencyGrid grid_for_propagation(double t0_ps, double max_delay_ps, double max_gdd_ps2,
                                   std::size_t min_points) {
  if (!(t0_ps > 0)) throw InvalidArgument("pulse t0 must be > 0");
  const double span = 16.0 / t0_ps;
  // Spectral content beyond |Omega| = 6/T0 carries < 1e-15 of the energy.
  const double needed = 2.0 * (std::abs(max_delay_ps) + std::abs(max_gdd_ps2) * 6.0 / t0_ps) +
                        40.0 * t0_ps;
  const double step = 2.0 * units::kPi / span;
  const auto samples = static_cast<std::size_t>(std::ceil(needed / step));
  return FrequencyGrid(std::bit_ceil(std::max(samples, std::max<std::size_t>(min_points, 16))), span);
}

}  // namespace homdisp
