#include "homdisp/hom_core.hpp"

#include <cmath>
#include <string>

#include "homdisp/error.hpp"
#include "homdisp/units.hpp"

namespace homdisp {
namespace {

void require_same_grid(const SpectralAmplitude& a, const SpectralAmplitude& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size())
    throw GridMismatch("spectra are sampled on different frequency grids");
  if (a.center_wavelength_nm != b.center_wavelength_nm)
    throw GridMismatch("spectra have different carrier wavelengths");
}

void require_t0(double t0) {
  if (!(t0 > 0) || !std::isfinite(t0)) throw InvalidArgument("T0 must be finite and > 0");
}

SpectralAmplitude with_excess_phase(const SpectralAmplitude& spec, const ArmConfig& arm) {
  SpectralAmplitude out = spec;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] *= std::polar(1.0, arm.excess_phase(out.grid.omega(k)));
  }
  return out;
}

}  // namespace

double ArmConfig::group_delay_ps() const {
  double sum = 0;
  for (const auto& e : elements) sum += e.group_delay_ps();
  return sum;
}

double ArmConfig::gdd_ps2() const {
  double sum = 0;
  for (const auto& e : elements) sum += e.gdd_ps2();
  return sum;
}

double ArmConfig::excess_phase(double omega) const {
  double sum = 0;
  for (const auto& e : elements) sum += e.excess_phase(omega);
  return sum;
}

void Detection::validate() const {
  for (double eta : {eta_c, eta_d}) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("detector efficiency must lie in [0, 1]");
  }
  for (double g2 : {g2_a, g2_b}) {
    if (!(g2 >= 0.0) || !std::isfinite(g2)) throw InvalidArgument("g2(0) must be finite and >= 0");
  }
}

double CoincidenceTerms::total() const {
  double sum = 0;
  for (const auto& t : terms) sum += t.real();
  return sum;
}

double delta_tau_of_arms(const ArmConfig& arm_a, const ArmConfig& arm_b) {
  return arm_a.group_delay_ps() - arm_b.group_delay_ps();
}

double alpha_of_arms(const ArmConfig& arm_a, const ArmConfig& arm_b) {
  return arm_a.gdd_ps2() - arm_b.gdd_ps2();
}

DipParameters dip_parameters(const ArmConfig& arm_a, const ArmConfig& arm_b, double t0_ps) {
  require_t0(t0_ps);
  return {delta_tau_of_arms(arm_a, arm_b), alpha_of_arms(arm_a, arm_b), t0_ps};
}

Complex overlap_integral(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                         const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps) {
  require_same_grid(spec_a, spec_b);
  if (!std::isfinite(tau_ps)) throw InvalidArgument("delay must be finite");
  const double offset = tau_ps - delta_tau_of_arms(arm_a, arm_b);
  Complex sum = 0;
  for (std::size_t k = 0; k < spec_a.values.size(); ++k) {
    const double w = spec_a.grid.omega(k);
    const double phase = w * offset - arm_a.excess_phase(w) + arm_b.excess_phase(w);
    sum += std::conj(spec_a.values[k]) * spec_b.values[k] * std::polar(1.0, phase);
  }
  return sum * spec_a.grid.spacing();
}

double coincidence_baseline(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                            const Detection& detection) {
  detection.validate();
  const double na = spec_a.photon_number();
  const double nb = spec_b.photon_number();
  return 0.25 * detection.eta_c * detection.eta_d *
         (detection.g2_a * na * na + detection.g2_b * nb * nb + 2.0 * na * nb);
}

double coincidence_rate_general(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                                const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps,
                                const Detection& detection) {
  const double overlap = std::norm(overlap_integral(spec_a, spec_b, arm_a, arm_b, tau_ps));
  const double base = coincidence_baseline(spec_a, spec_b, detection);
  const double rate = base - 0.5 * detection.eta_c * detection.eta_d * overlap;
  // Cauchy-Schwarz keeps this >= 0 up to rounding.
  return std::max(rate, 0.0);
}

double coincidence_probability_gaussian(const DipParameters& params, double tau_ps) {
  require_t0(params.t0_ps);
  const double t0 = params.t0_ps;
  const double t02 = t0 * t0;
  const double a = params.alpha_ps2;
  const double x = tau_ps - params.delta_tau_ps;
  const double depth = t02 / std::sqrt(4.0 * t02 * t02 + a * a);
  const double width2 = 4.0 * t02 + (a / t0) * (a / t0);
  return 1.0 - depth * std::exp(-2.0 * x * x / width2);
}

double dip_fwhm(const DipParameters& params) {
  require_t0(params.t0_ps);
  const double t0 = params.t0_ps;
  const double q = params.alpha_ps2 / (2.0 * t0);
  return 2.0 * std::sqrt(std::log(4.0)) * std::sqrt(t0 * t0 + q * q);
}

double min_dip_fwhm(double t0_ps) {
  require_t0(t0_ps);
  return 2.0 * std::sqrt(std::log(4.0)) * t0_ps;
}

double extract_alpha_from_fwhm(double fwhm_ps, double t0_ps) {
  require_t0(t0_ps);
  if (!std::isfinite(fwhm_ps)) throw InvalidArgument("dip width must be finite");
  const double floor = min_dip_fwhm(t0_ps);
  const double radicand = fwhm_ps * fwhm_ps / (2.0 * std::log(2.0)) - 4.0 * t0_ps * t0_ps;
  // Rounding at the boundary itself maps to alpha = 0.
  if (std::abs(radicand) <= 1e-12 * 4.0 * t0_ps * t0_ps) return 0.0;
  if (fwhm_ps < floor) {
    throw InfeasibleWidth("dip FWHM " + std::to_string(fwhm_ps) +
                          " ps is below the dispersion-free minimum " + std::to_string(floor) + " ps");
  }
  return t0_ps * std::sqrt(std::max(radicand, 0.0));
}

CoincidenceTerms term_decomposition(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                                    const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps,
                                    const Detection& detection, bool average_oscillating) {
  require_same_grid(spec_a, spec_b);
  detection.validate();
  if (!std::isfinite(tau_ps)) throw InvalidArgument("delay must be finite");

  // Envelopes relative to arm A's group delay; arm B carries the residual delay.
  const double offset = tau_ps - delta_tau_of_arms(arm_a, arm_b);
  const TemporalField field_a = to_temporal_field(with_excess_phase(spec_a, arm_a));
  const TemporalField field_b = to_temporal_field(apply_delay(with_excess_phase(spec_b, arm_b), offset));

  const double dt = field_a.grid.time_step();
  double na = 0, nb = 0;
  Complex cross = 0;
  for (std::size_t j = 0; j < field_a.values.size(); ++j) {
    na += std::norm(field_a.values[j]);
    nb += std::norm(field_b.values[j]);
    cross += std::conj(field_a.values[j]) * field_b.values[j];
  }
  na *= dt;
  nb *= dt;
  cross *= dt;

  const double pref = 0.25 * detection.eta_c * detection.eta_d;
  // Carrier factor of the delayed arm: exp(i omega0 tau).
  const Complex carrier = std::polar(1.0, units::angular_frequency(spec_a.center_wavelength_nm) * tau_ps);
  const Complex projected = carrier * cross;

  CoincidenceTerms out;
  out.terms[0] = pref * detection.g2_a * na * na;
  out.terms[1] = pref * detection.g2_b * nb * nb;
  if (!average_oscillating) {
    out.terms[2] = -pref * projected * projected;
    out.terms[3] = std::conj(out.terms[2]);
  }
  out.terms[4] = pref * na * nb;
  out.terms[5] = pref * na * nb;
  out.terms[6] = -pref * std::norm(cross);
  out.terms[7] = -pref * std::norm(cross);
  return out;
}

}  // namespace homdisp
