#pragma once

#include <optional>
#include <string>

#include "homdisp/experiment.hpp"
#include "homdisp/fitting.hpp"

namespace homdisp {

/// Standalone SVG: curve points (counts when present, else expectation), an
/// optional fitted model overlay and its FWHM annotation.
/// Throws InvalidArgument on an empty curve.
std::string render_dip_svg(const HomCurve& curve, const std::optional<DipModel>& fit);

}  // namespace homdisp
