#include "homdisp/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "homdisp/curve_file.hpp"
#include "homdisp/error.hpp"
#include "homdisp/experiment_file.hpp"
#include "homdisp/fitting.hpp"
#include "homdisp/random.hpp"
#include "homdisp/reports.hpp"
#include "homdisp/svg_plot.hpp"
#include "homdisp/units.hpp"

namespace homdisp {
namespace {

namespace fs = std::filesystem;

// --out wins; otherwise the default name goes to $HOMDISP_OUT_DIR (or the
// working directory).
std::string resolve_out(const std::string& out, const std::string& default_name) {
  if (!out.empty()) return out;
  const char* dir = std::getenv("HOMDISP_OUT_DIR");
  if (dir && *dir) return (fs::path(dir) / default_name).string();
  return default_name;
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

HomCurve simulate(const ScanConfig& config) {
  HomCurve curve = expected_curve(config);
  curve.config_echo = dump_experiment(config, false);
  return curve;
}

struct FitOptions {
  int mc_trials = 1000;
  std::uint64_t seed = 0;
  std::string report = "json";
  std::string out;
};

void add_fit_options(CLI::App* cmd, FitOptions& o) {
  cmd->add_option("--mc-trials", o.mc_trials, "Monte-Carlo refits")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Monte-Carlo seed")->capture_default_str();
  cmd->add_option("--report", o.report, "report format")->capture_default_str()->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hong-Ou-Mandel dip simulation, fitting and dispersion extraction"};
  app.require_subcommand(1);

  std::string experiment, curve_path, out_path, fit_path;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "write the noiseless expected curve of an experiment");
  sim->add_option("experiment", experiment, "experiment file (JSON)")->required();
  sim->add_option("--out", out_path, "curve file to write");

  auto* synth = app.add_subcommand("synth", "write a Poisson-sampled curve of an experiment");
  synth->add_option("experiment", experiment, "experiment file (JSON)")->required();
  synth->add_option("--seed", seed, "sampling seed (default: rng_seed of the file, else entropy)");
  synth->add_option("--out", out_path, "curve file to write");

  auto* replay = app.add_subcommand("replay", "regenerate a curve from the configuration and seed in its header");
  replay->add_option("curve", curve_path, "curve file")->required();
  replay->add_option("--out", out_path, "curve file to write");

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "Gaussian dip fit with Monte-Carlo uncertainties");
  fit->add_option("curve", curve_path, "curve file")->required();
  add_fit_options(fit, fit_opt);

  FitOptions ext_opt;
  double t0_fwhm = 0, t0_fwhm_sigma = 0, length_m = 0, wavelength_nm = 0;
  auto* ext = app.add_subcommand("extract-dispersion", "dispersion coefficient of the unbalanced element");
  ext->add_option("curve", curve_path, "curve file")->required();
  ext->add_option("--t0-fwhm", t0_fwhm, "source pulse FWHM (ps)")->required()->check(CLI::PositiveNumber);
  ext->add_option("--t0-fwhm-sigma", t0_fwhm_sigma, "1 sigma of the source pulse FWHM (ps)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  ext->add_option("--length", length_m, "length of the unbalanced element (m)")->required()->check(CLI::PositiveNumber);
  ext->add_option("--wavelength", wavelength_nm, "carrier wavelength (nm)")->required()->check(CLI::PositiveNumber);
  add_fit_options(ext, ext_opt);

  auto* plot = app.add_subcommand("plot", "render a curve (and optional fit) as SVG");
  plot->add_option("curve", curve_path, "curve file")->required();
  plot->add_option("fit-report", fit_path, "JSON fit or dispersion report to overlay");
  plot->add_option("--out", out_path, "SVG file to write");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      const ScanConfig config = load_experiment(experiment);
      const std::string path = resolve_out(out_path, stem(experiment) + ".curve");
      write_curve(simulate(config), path);
      err << "wrote " << path << "\n";
    } else if (synth->parsed()) {
      const ScanConfig config = load_experiment(experiment);
      const std::uint64_t s = seed ? *seed : config.rng_seed ? *config.rng_seed : entropy_seed();
      const std::string path = resolve_out(out_path, stem(experiment) + ".seed" + std::to_string(s) + ".curve");
      write_curve(sample_counts(simulate(config), s), path);
      err << "wrote " << path << " (seed " << s << ")\n";
    } else if (replay->parsed()) {
      const HomCurve recorded = read_curve(curve_path);
      if (recorded.config_echo.empty()) throw SchemaError(curve_path + ": header carries no configuration");
      const ScanConfig config = parse_experiment(recorded.config_echo);
      HomCurve again = simulate(config);
      if (recorded.seed) again = sample_counts(again, *recorded.seed);
      const std::string path = resolve_out(out_path, stem(curve_path) + ".replay.curve");
      write_curve(again, path);
      err << "wrote " << path << "\n";
    } else if (fit->parsed()) {
      const HomCurve curve = read_curve(curve_path);
      const FitResult r = monte_carlo_fit(curve, fit_opt.mc_trials, fit_opt.seed);
      emit(fit_opt.report == "json" ? fit_report_json(r, fit_opt.seed) : fit_report_text(r, fit_opt.seed),
           fit_opt.out, out);
    } else if (ext->parsed()) {
      const HomCurve curve = read_curve(curve_path);
      const FitResult r = monte_carlo_fit(curve, ext_opt.mc_trials, ext_opt.seed);
      // Direct fit as the central width, Monte-Carlo spread as its sigma.
      const DispersionEstimate e =
          dispersion_from_dip(r.direct.fwhm_ps(), r.fwhm_uncertainty_ps, units::fwhm_to_t0(t0_fwhm),
                              units::fwhm_to_t0(t0_fwhm_sigma), length_m, wavelength_nm, ext_opt.mc_trials,
                              ext_opt.seed);
      emit(ext_opt.report == "json" ? dispersion_report_json(e, r, ext_opt.seed)
                                    : dispersion_report_text(e, r, ext_opt.seed),
           ext_opt.out, out);
    } else if (plot->parsed()) {
      const HomCurve curve = read_curve(curve_path);
      if (curve.delays_ps.empty()) throw SchemaError(curve_path + ": curve has no data rows");
      std::optional<DipModel> model;
      if (!fit_path.empty()) model = parse_fit_report(read_text_file(fit_path));
      const std::string path = resolve_out(out_path, stem(curve_path) + ".svg");
      write_text_file(path, render_dip_svg(curve, model));
      err << "wrote " << path << "\n";
    }
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const DipNotFound& e) {
    err << "error: " << e.what() << "\n";
    return kExitDipNotFound;
  } catch (const InfeasibleWidth& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasibleWidth;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPhysics;
  }
  return kExitOk;
}

}  // namespace homdisp
