#include "homdisp/reports.hpp"

#include <cmath>
#include <cstdio>

#include "homdisp/error.hpp"
#include "json.hpp"

namespace homdisp {
namespace {

using Json = nlohmann::ordered_json;

Json measured(double value, double sigma) { return Json{{"value", value}, {"sigma", sigma}}; }

Json model_json(const DipModel& m) {
  return Json{{"baseline", m.baseline},
              {"visibility", m.visibility},
              {"center_ps", m.center_ps},
              {"sigma_ps", m.sigma_ps},
              {"fwhm_ps", m.fwhm_ps()}};
}

Json fit_json(const FitResult& f, std::uint64_t seed) {
  Json j;
  j["schema"] = kFitReportSchema;
  j["n_points"] = f.n_points;
  j["mc_trials"] = f.n_mc_trials;
  j["mc_seed"] = seed;
  j["mc_failures"] = f.mc_failures;
  j["uncertainties_defined"] = f.uncertainties_defined;
  j["baseline"] = measured(f.estimate.baseline, f.uncertainty.baseline);
  j["visibility"] = measured(f.estimate.visibility, f.uncertainty.visibility);
  j["center_ps"] = measured(f.estimate.center_ps, f.uncertainty.center_ps);
  j["sigma_ps"] = measured(f.estimate.sigma_ps, f.uncertainty.sigma_ps);
  j["fwhm_ps"] = measured(f.fwhm_ps, f.fwhm_uncertainty_ps);
  j["pulse_width_fwhm_ps"] =
      measured(pulse_width_from_dip(f.fwhm_ps), f.fwhm_uncertainty_ps / std::sqrt(2.0));
  j["direct_fit"] = model_json(f.direct);
  j["iterations"] = f.iterations;
  j["residual_norm"] = f.residual_norm;
  j["chi2_reduced"] = f.chi2_reduced;
  return j;
}

std::string line(const char* name, double value, double sigma, const char* unit) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %.6g +- %.3g %s\n", name, value, sigma, unit);
  return buf;
}

std::string fit_text_body(const FitResult& f, std::uint64_t seed) {
  std::string out;
  out += line("dip fwhm", f.fwhm_ps, f.fwhm_uncertainty_ps, "ps");
  out += line("pulse width (fwhm)", pulse_width_from_dip(f.fwhm_ps), f.fwhm_uncertainty_ps / std::sqrt(2.0), "ps");
  out += line("center", f.estimate.center_ps, f.uncertainty.center_ps, "ps");
  out += line("visibility", f.estimate.visibility, f.uncertainty.visibility, "");
  out += line("baseline", f.estimate.baseline, f.uncertainty.baseline, "counts");
  char buf[200];
  std::snprintf(buf, sizeof buf, "mc trials %d (seed %llu, failures %d%s), %d iterations, chi2/dof %.4g\n",
                f.n_mc_trials, static_cast<unsigned long long>(seed), f.mc_failures,
                f.uncertainties_defined ? "" : ", uncertainties undefined", f.iterations, f.chi2_reduced);
  return out + buf;
}

}  // namespace

std::string fit_report_json(const FitResult& fit, std::uint64_t mc_seed) {
  return fit_json(fit, mc_seed).dump(2) + "\n";
}

std::string fit_report_text(const FitResult& fit, std::uint64_t mc_seed) { return fit_text_body(fit, mc_seed); }

std::string dispersion_report_json(const DispersionEstimate& e, const FitResult& fit, std::uint64_t seed) {
  Json j;
  j["schema"] = kDispersionReportSchema;
  j["alpha_ps2"] = measured(e.alpha_ps2, e.alpha_sigma);
  j["beta2_ps2_per_km"] = measured(e.beta2_ps2_per_km, e.beta2_sigma);
  Json d = measured(e.d_ps_per_nm_km, e.d_sigma);
  d["sigma_from_dip_width"] = e.d_sigma_from_width;
  d["sigma_from_t0"] = e.d_sigma_from_t0;
  j["dispersion_ps_per_nm_km"] = d;
  j["sign_observable"] = false;
  j["near_boundary"] = e.near_boundary;
  j["boundary_hits"] = e.boundary_hits;
  j["mc_trials"] = e.mc_trials;
  j["seed"] = seed;
  j["inputs"] = Json{{"dip_fwhm_ps", e.dip_fwhm_ps},       {"dip_fwhm_sigma_ps", e.dip_fwhm_sigma_ps},
                     {"t0_ps", e.t0_ps},                   {"t0_sigma_ps", e.t0_sigma_ps},
                     {"length_m", e.length_m},             {"wavelength_nm", e.wavelength_nm}};
  j["fit"] = fit_json(fit, seed);
  return j.dump(2) + "\n";
}

std::string dispersion_report_text(const DispersionEstimate& e, const FitResult& fit, std::uint64_t seed) {
  std::string out;
  out += line("D (magnitude)", e.d_ps_per_nm_km, e.d_sigma, "ps/(nm km)");
  out += line("  from dip width", e.d_ps_per_nm_km, e.d_sigma_from_width, "ps/(nm km)");
  out += line("  from T0", e.d_ps_per_nm_km, e.d_sigma_from_t0, "ps/(nm km)");
  out += line("beta2 (magnitude)", e.beta2_ps2_per_km, e.beta2_sigma, "ps^2/km");
  out += line("alpha", e.alpha_ps2, e.alpha_sigma, "ps^2");
  if (e.near_boundary) out += "warning: dip width within 1 sigma of the dispersion-free floor\n";
  out += fit_text_body(fit, seed);
  return out;
}

DipModel parse_fit_report(const std::string& text) {
  try {
    const Json root = Json::parse(text);
    const Json* fit = &root;
    if (root.value("schema", "") == kDispersionReportSchema) fit = &root.at("fit");
    if (fit->value("schema", "") != kFitReportSchema) throw SchemaError("not a homdisp fit report");
    const Json& m = fit->at("direct_fit");
    DipModel out{m.at("baseline").get<double>(), m.at("visibility").get<double>(), m.at("center_ps").get<double>(),
                 m.at("sigma_ps").get<double>()};
    if (!(out.sigma_ps > 0)) throw SchemaError("fit report has a non-positive width");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed fit report: ") + e.what());
  }
}

}  // namespace homdisp
