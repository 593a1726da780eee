#pragma once

#include <array>
#include <complex>
#include <vector>

#include "homdisp/wavepacket.hpp"

namespace homdisp {

/// One interferometer arm: an ordered chain of dispersive elements.
struct ArmConfig {
  std::vector<DispersiveElement> elements;

  double group_delay_ps() const;  ///< sum of beta1 L
  double gdd_ps2() const;         ///< sum of beta2 L
  /// Sum of the elements' phases beyond the group-delay term.
  double excess_phase(double omega) const;
};

/// Parameters of the Gaussian closed-form dip.
struct DipParameters {
  double delta_tau_ps = 0.0;  ///< group-delay difference, A minus B
  double alpha_ps2 = 0.0;     ///< beta2 L difference, A minus B
  double t0_ps = 1.0;
};

/// Detector efficiencies of the two output ports and the sources' g2(0).
struct Detection {
  double eta_c = 1.0;
  double eta_d = 1.0;
  double g2_a = 1.0;
  double g2_b = 1.0;

  void validate() const;
};

/// The eight contributions to the coincidence count. Index i holds n_{i+1}:
/// 0,1 auto-correlation of A and B; 2,3 the pair oscillating at 2 omega0;
/// 4,5 cross terms; 6,7 the interference terms.
struct CoincidenceTerms {
  std::array<Complex, 8> terms{};

  double total() const;
};

double delta_tau_of_arms(const ArmConfig& arm_a, const ArmConfig& arm_b);
double alpha_of_arms(const ArmConfig& arm_a, const ArmConfig& arm_b);
DipParameters dip_parameters(const ArmConfig& arm_a, const ArmConfig& arm_b, double t0_ps);

/// <A|B(tau)> = integral dOmega alpha_A*(Omega) alpha_B(Omega)
///              exp(i [Omega (tau - delta_tau) - excess_A(Omega) + excess_B(Omega)])
/// where arm B is delayed by `tau_ps`. The linear phase is taken relative to
/// the arms' group-delay difference so that large common delays do not cost
/// precision. Throws GridMismatch unless both spectra share grid and carrier.
Complex overlap_integral(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                         const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps);

/// (eta_C eta_D / 4) [g2_A N_A^2 + g2_B N_B^2 + 2 N_A N_B - 2 |<A|B(tau)>|^2]
double coincidence_rate_general(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                                const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps,
                                const Detection& detection = {});

/// The tau -> infinity limit of coincidence_rate_general.
double coincidence_baseline(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                            const Detection& detection = {});

/// Coincidence probability normalized to the baseline, for balanced coherent
/// Gaussian pulses:
///   P(tau) = 1 - T0^2 / sqrt(4 T0^4 + alpha^2)
///              * exp(-2 (tau - delta_tau)^2 / (4 T0^2 + (alpha / T0)^2))
double coincidence_probability_gaussian(const DipParameters& params, double tau_ps);

/// Dip FWHM: 2 sqrt(ln 4) sqrt(T0^2 + (alpha / 2 T0)^2).
double dip_fwhm(const DipParameters& params);

/// Narrowest possible dip for half-width t0 (alpha = 0): 2 sqrt(ln 4) t0.
double min_dip_fwhm(double t0_ps);

/// Inverse of dip_fwhm: |alpha| = T0 sqrt(d^2 / (2 ln 2) - 4 T0^2).
/// Throws InfeasibleWidth when d is below min_dip_fwhm(t0).
double extract_alpha_from_fwhm(double fwhm_ps, double t0_ps);

/// Each coincidence term by direct quadrature of the dispersed, delayed
/// temporal envelopes. With `average_oscillating` the 2 omega0 pair is zeroed,
/// as happens when the optical path fluctuates faster than the integration
/// time; the remaining sum equals coincidence_rate_general.
CoincidenceTerms term_decomposition(const SpectralAmplitude& spec_a, const SpectralAmplitude& spec_b,
                                    const ArmConfig& arm_a, const ArmConfig& arm_b, double tau_ps,
                                    const Detection& detection, bool average_oscillating = true);

}  // namespace homdisp
