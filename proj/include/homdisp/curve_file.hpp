#pragma once

#include <cstdint>
#include <string>

#include "homdisp/experiment.hpp"

namespace homdisp {

inline constexpr const char* kCurveHeader = "# homdisp-curve v1";

/// Text table, one row per delay:
///   # homdisp-curve v1
///   # seed: <n>|none
///   # config: <single-line experiment JSON, or empty>
///   # checksum: fnv1a64:<16 hex digits over the data rows>
///   # columns: delay_ps expected_rate [counts]
///   <rows, %.17g>
/// Reading back gives the identical HomCurve.
std::string format_curve(const HomCurve& curve);
HomCurve parse_curve(const std::string& text);

void write_curve(const HomCurve& curve, const std::string& path);
/// Throws SchemaError on unreadable or malformed files (with the line number)
/// and on checksum mismatch.
HomCurve read_curve(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

/// Shared helpers for lossless text output.
std::string format_double(double v);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace homdisp
