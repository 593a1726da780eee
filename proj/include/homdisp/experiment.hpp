#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homdisp/hom_core.hpp"
#include "homdisp/wavepacket.hpp"

namespace homdisp {

/// Full description of a delay scan: source, both arms, detection chain.
struct ScanConfig {
  ArmConfig arm_a;
  ArmConfig arm_b;
  GaussianPulse pulse_a;
  GaussianPulse pulse_b;
  std::vector<double> delays_ps;
  double repetition_rate_hz = 5e6;
  double integration_time_s = 10.0;  ///< per delay point
  double efficiency_c = 0.68;
  double efficiency_d = 0.68;
  double coincidence_window_ps = 25000.0;
  double timing_jitter_fwhm_ps = 270.0;
  std::optional<std::uint64_t> rng_seed;  ///< default for sampling when no seed is given

  /// Throws InvalidArgument on out-of-range fields or a delay grid that is
  /// empty or not strictly increasing.
  void validate() const;

  /// Laser pulses per delay point.
  double trials_per_point() const { return repetition_rate_hz * integration_time_s; }
  Detection detection() const;

  /// The closed forms assume the coincidence window captures every pair of
  /// detections from the same pulse. Throws InvalidArgument when the window is
  /// narrower than three times the FWHM of the pair arrival-time difference
  /// (dispersed pulses plus jitter), or longer than the pulse period.
  void check_window_assumption() const;
};

/// Default scan: `points` delays evenly spanning +-`half_width_in_dips` closed-form
/// dip widths around the dip center.
std::vector<double> default_delay_grid(const ArmConfig& arm_a, const ArmConfig& arm_b, double t0_ps,
                                       std::size_t points = 41, double half_width_in_dips = 3.0);

/// Delay-indexed coincidence data.
struct HomCurve {
  std::vector<double> delays_ps;
  std::vector<double> expected;                   ///< expected coincidences per point
  std::optional<std::vector<std::int64_t>> counts;  ///< present after sampling
  std::optional<std::uint64_t> seed;
  std::string config_echo;  ///< serialized generating configuration, may be empty

  /// Observed values when sampled, otherwise the expectation.
  std::vector<double> observed() const;
  void validate() const;
};

/// Noiseless curve: coincidence_rate_general(tau) * pulses per point.
HomCurve expected_curve(const ScanConfig& config);

/// Independent Poisson draw per point. Point i uses substream i of `seed`, so
/// results do not depend on evaluation order.
HomCurve sample_counts(const HomCurve& curve, std::uint64_t seed);

/// Convolution with a unit-area Gaussian of the given FWHM (timing jitter).
TemporalProfile jitter_convolved_profile(const TemporalProfile& profile, double jitter_fwhm_ps);

/// Arrival-time histogram of `pulse` after `chain`, as seen through a detector
/// with the given timing jitter.
TemporalProfile detected_pulse_profile(const GaussianPulse& pulse, const ArmConfig& chain,
                                       double jitter_fwhm_ps);

/// Expected singles per delay point at detectors C and D:
/// eta * (N_A + N_B) / 2 * pulses per point. Independent of the delay.
std::pair<double, double> singles_rates(const ScanConfig& config);

}  // namespace homdisp
