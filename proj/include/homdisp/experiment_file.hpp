#pragma once

#include <string>

#include "homdisp/experiment.hpp"

namespace homdisp {

inline constexpr const char* kExperimentSchema = "homdisp.experiment/1";

/// Parses an experiment description (JSON, units in key names). Unknown keys,
/// wrong types and out-of-range values throw SchemaError naming the field path;
/// syntax errors carry the line and column.
///
/// Top level: schema, pulse, arm_a, arm_b, detection, scan, [rng_seed].
/// Elements: length_m, [beta1_ps_per_m], one of beta2_ps2_per_km or
/// dispersion_ps_per_nm_km (+ [reference_wavelength_nm]), [beta3_ps3_per_km], [name].
ScanConfig parse_experiment(const std::string& text);
ScanConfig load_experiment(const std::string& path);

/// Canonical form: explicit delays, beta2 per element, T0 per pulse. Loading
/// the dump gives back the same ScanConfig, so dump is a fixed point.
std::string dump_experiment(const ScanConfig& config, bool pretty = true);

}  // namespace homdisp
