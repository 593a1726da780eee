#pragma once

#include <cstdint>
#include <string>

#include "homdisp/fitting.hpp"

namespace homdisp {

inline constexpr const char* kFitReportSchema = "homdisp.fit-report/1";
inline constexpr const char* kDispersionReportSchema = "homdisp.dispersion-report/1";

/// Fit report. Values are Monte-Carlo means with their standard deviations
/// (or the direct fit with covariance errors when no trials ran), plus the
/// direct fit and the source pulse width d / sqrt(2).
std::string fit_report_json(const FitResult& fit, std::uint64_t mc_seed);
std::string fit_report_text(const FitResult& fit, std::uint64_t mc_seed);

std::string dispersion_report_json(const DispersionEstimate& est, const FitResult& fit, std::uint64_t seed);
std::string dispersion_report_text(const DispersionEstimate& est, const FitResult& fit, std::uint64_t seed);

/// The direct-fit model stored in a JSON fit report (or the "fit" section of a
/// dispersion report). Throws SchemaError on malformed input.
DipModel parse_fit_report(const std::string& text);

}  // namespace homdisp
