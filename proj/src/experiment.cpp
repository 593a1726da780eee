#include "homdisp/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "homdisp/error.hpp"
#include "homdisp/fourier.hpp"
#include "homdisp/random.hpp"
#include "homdisp/units.hpp"

namespace homdisp {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void ScanConfig::validate() const {
  pulse_a.validate();
  pulse_b.validate();
  if (pulse_a.center_wavelength_nm != pulse_b.center_wavelength_nm)
    throw InvalidArgument("both pulses must share one center wavelength");
  for (const auto* arm : {&arm_a, &arm_b})
    for (const auto& e : arm->elements) e.validate();
  require_positive(repetition_rate_hz, "repetition rate");
  require_positive(integration_time_s, "integration time");
  require_positive(coincidence_window_ps, "coincidence window");
  require_unit_interval(efficiency_c, "detector efficiency C");
  require_unit_interval(efficiency_d, "detector efficiency D");
  if (!(timing_jitter_fwhm_ps >= 0) || !std::isfinite(timing_jitter_fwhm_ps))
    throw InvalidArgument("timing jitter must be finite and >= 0");
  if (delays_ps.empty()) throw InvalidArgument("delay grid is empty");
  for (std::size_t i = 0; i < delays_ps.size(); ++i) {
    if (!std::isfinite(delays_ps[i])) throw InvalidArgument("delay grid contains a non-finite value");
    if (i > 0 && !(delays_ps[i] > delays_ps[i - 1]))
      throw InvalidArgument("delay grid must be strictly increasing");
  }
}

Detection ScanConfig::detection() const {
  return {efficiency_c, efficiency_d, pulse_a.source_g2, pulse_b.source_g2};
}

void ScanConfig::check_window_assumption() const {
  const double wa = broadened_width_closed_form(pulse_a.t0_ps, arm_a.gdd_ps2());
  const double wb = broadened_width_closed_form(pulse_b.t0_ps, arm_b.gdd_ps2());
  const double j2 = timing_jitter_fwhm_ps * timing_jitter_fwhm_ps;
  // Difference of two independent Gaussian arrival times.
  const double pair_fwhm = std::sqrt(wa * wa + wb * wb + 2.0 * j2);
  if (coincidence_window_ps < 3.0 * pair_fwhm) {
    throw InvalidArgument("coincidence window " + std::to_string(coincidence_window_ps) +
                          " ps does not cover the detection-time spread (needs >= " +
                          std::to_string(3.0 * pair_fwhm) + " ps)");
  }
  const double period_ps = 1e12 / repetition_rate_hz;
  if (coincidence_window_ps >= period_ps) {
    throw InvalidArgument("coincidence window must be shorter than the pulse period " +
                          std::to_string(period_ps) + " ps");
  }
}

std::vector<double> default_delay_grid(const ArmConfig& arm_a, const ArmConfig& arm_b, double t0_ps,
                                       std::size_t points, double half_width_in_dips) {
  if (points < 2) throw InvalidArgument("delay grid needs at least two points");
  if (!(half_width_in_dips > 0)) throw InvalidArgument("delay grid half-width must be > 0");
  const DipParameters dip = dip_parameters(arm_a, arm_b, t0_ps);
  const double half = half_width_in_dips * dip_fwhm(dip);
  std::vector<double> delays(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    delays[i] = dip.delta_tau_ps - half + 2.0 * half * f;
  }
  return delays;
}

std::vector<double> HomCurve::observed() const {
  if (!counts) return expected;
  return {counts->begin(), counts->end()};
}

void HomCurve::validate() const {
  if (expected.size() != delays_ps.size()) throw InvalidArgument("curve columns differ in length");
  if (counts && counts->size() != delays_ps.size()) throw InvalidArgument("curve columns differ in length");
  for (double e : expected)
    if (!(e >= 0) || !std::isfinite(e)) throw InvalidArgument("expected rate must be finite and >= 0");
  if (counts)
    for (auto c : *counts)
      if (c < 0) throw InvalidArgument("counts must be >= 0");
}

HomCurve expected_curve(const ScanConfig& config) {
  config.validate();
  config.check_window_assumption();

  const double dtau = delta_tau_of_arms(config.arm_a, config.arm_b);
  double max_offset = 0;
  for (double tau : config.delays_ps) max_offset = std::max(max_offset, std::abs(tau - dtau));
  const double t0_min = std::min(config.pulse_a.t0_ps, config.pulse_b.t0_ps);
  const FrequencyGrid grid =
      grid_for_propagation(t0_min, max_offset, std::abs(alpha_of_arms(config.arm_a, config.arm_b)));
  const auto spec_a = gaussian_spectral_amplitude(config.pulse_a, grid);
  const auto spec_b = gaussian_spectral_amplitude(config.pulse_b, grid);
  const Detection det = config.detection();
  const double trials = config.trials_per_point();

  HomCurve curve;
  curve.delays_ps = config.delays_ps;
  curve.expected.reserve(config.delays_ps.size());
  for (double tau : config.delays_ps) {
    curve.expected.push_back(trials *
                             coincidence_rate_general(spec_a, spec_b, config.arm_a, config.arm_b, tau, det));
  }
  return curve;
}

HomCurve sample_counts(const HomCurve& curve, std::uint64_t seed) {
  curve.validate();
  HomCurve out = curve;
  std::vector<std::int64_t> counts(curve.expected.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    counts[i] = poisson_draw(curve.expected[i], substream_seed(seed, i));
  }
  out.counts = std::move(counts);
  out.seed = seed;
  return out;
}

TemporalProfile jitter_convolved_profile(const TemporalProfile& profile, double jitter_fwhm_ps) {
  if (!(jitter_fwhm_ps >= 0) || !std::isfinite(jitter_fwhm_ps))
    throw InvalidArgument("jitter FWHM must be finite and >= 0");
  if (jitter_fwhm_ps == 0 || profile.intensity.size() < 2) return profile;

  const std::size_t n = profile.intensity.size();
  const double dt = profile.time_step();
  const double sigma = jitter_fwhm_ps / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  // Zero padding on both sides keeps the circular convolution from wrapping.
  const auto pad = static_cast<std::size_t>(std::ceil(8.0 * sigma / dt));
  const std::size_t total = std::bit_ceil(n + 2 * pad);
  const std::size_t lead = (total - n) / 2;

  std::vector<fourier::Complex> buf(total);
  for (std::size_t j = 0; j < n; ++j) buf[lead + j] = profile.intensity[j];
  auto spec = fourier::centered_dft(buf, -1);
  const double d_omega = 2.0 * units::kPi / (static_cast<double>(total) * dt);
  for (std::size_t k = 0; k < total; ++k) {
    const double w = (static_cast<double>(k) - 0.5 * static_cast<double>(total - 1)) * d_omega;
    spec[k] *= std::exp(-0.5 * sigma * sigma * w * w) / static_cast<double>(total);
  }
  const auto smoothed = fourier::centered_dft(spec, +1);

  TemporalProfile out;
  out.times_ps = profile.times_ps;
  out.intensity.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.intensity[j] = std::max(smoothed[lead + j].real(), 0.0);
  return out;
}

TemporalProfile detected_pulse_profile(const GaussianPulse& pulse, const ArmConfig& chain,
                                       double jitter_fwhm_ps) {
  pulse.validate();
  const double sigma_j = jitter_fwhm_ps / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const FrequencyGrid grid =
      grid_for_propagation(pulse.t0_ps, 6.0 * sigma_j, std::abs(chain.gdd_ps2()));
  auto spec = gaussian_spectral_amplitude(pulse, grid);
  // Envelope only: the common group delay just relabels the time axis.
  for (std::size_t k = 0; k < spec.values.size(); ++k)
    spec.values[k] *= std::polar(1.0, chain.excess_phase(grid.omega(k)));
  return jitter_convolved_profile(to_temporal_profile(spec), jitter_fwhm_ps);
}

std::pair<double, double> singles_rates(const ScanConfig& config) {
  config.validate();
  const double mean = 0.5 * (config.pulse_a.mean_photon_number + config.pulse_b.mean_photon_number);
  const double trials = config.trials_per_point();
  return {config.efficiency_c * mean * trials, config.efficiency_d * mean * trials};
}

}  // namespace homdisp
