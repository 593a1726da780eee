#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "homdisp/cli.hpp"
#include "homdisp/curve_file.hpp"
#include "homdisp/error.hpp"
#include "homdisp/experiment_file.hpp"
#include "homdisp/fitting.hpp"
#include "homdisp/units.hpp"
#include "json.hpp"

using namespace homdisp;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kSource = HOMDISP_SOURCE_DIR;

std::string config(const std::string& name) { return (kSource / "configs" / (name + ".json")).string(); }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("homdisp_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string with_replaced(const std::string& config_path, const std::function<void(Json&)>& edit) {
  Json j = Json::parse(read_text_file(config_path));
  edit(j);
  return j.dump();
}

}  // namespace

TEST_CASE("simulate") {
  TempDir tmp;
  const double floor_width = dip_fwhm({0, 0, units::fwhm_to_t0(0.732)});

  SUBCASE("no module: fitted width is the dispersion-free dip") {
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    const auto f = fit_gaussian_dip(read_curve(tmp / "a.curve"));
    CHECK(f.fwhm_ps == doctest::Approx(1.035).epsilon(0.005));
    CHECK(std::abs(f.fwhm_ps - floor_width) < 1e-6);
  }
  SUBCASE("common 50 km module leaves the dip unchanged") {
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    REQUIRE(run({"simulate", config("common_50km"), "--out", tmp / "b.curve"}).code == 0);
    const auto a = read_curve(tmp / "a.curve");
    const auto b = read_curve(tmp / "b.curve");
    REQUIRE(a.delays_ps == b.delays_ps);
    for (std::size_t i = 0; i < a.expected.size(); ++i)
      CHECK(std::abs(a.expected[i] - b.expected[i]) < 1e-9 * a.expected[i]);
    CHECK(fit_gaussian_dip(b).fwhm_ps == doctest::Approx(fit_gaussian_dip(a).fwhm_ps).epsilon(1e-6));
  }
  SUBCASE("80 m unbalanced") {
    REQUIRE(run({"simulate", config("unbalanced_80m"), "--out", tmp / "c.curve"}).code == 0);
    const ScanConfig cfg = load_experiment(config("unbalanced_80m"));
    const double expected = dip_fwhm(dip_parameters(cfg.arm_a, cfg.arm_b, cfg.pulse_a.t0_ps));
    const auto f = fit_gaussian_dip(read_curve(tmp / "c.curve"));
    CHECK(f.fwhm_ps == doctest::Approx(expected).epsilon(1e-5));
    CHECK(std::abs(f.fwhm_ps - 4.123) < 2 * 0.124);
    CHECK(f.estimate.visibility < 0.5);
  }
  SUBCASE("zero-length arms reproduce the closed form") {
    const std::string text = with_replaced(config("common_50km"), [](Json& j) {
      j["arm_a"]["elements"][0]["length_m"] = 0;
      j["arm_b"]["elements"][0]["length_m"] = 0;
    });
    write_text_file(tmp / "zero.json", text);
    REQUIRE(run({"simulate", tmp / "zero.json", "--out", tmp / "z.curve"}).code == 0);
    const auto c = read_curve(tmp / "z.curve");
    const ScanConfig cfg = load_experiment(tmp / "zero.json");
    const double base = 0.68 * 0.68 * 0.015 * 0.015 * cfg.trials_per_point();
    for (std::size_t i = 0; i < c.delays_ps.size(); ++i) {
      const double p = coincidence_probability_gaussian({0, 0, cfg.pulse_a.t0_ps}, c.delays_ps[i]);
      CHECK(c.expected[i] / base == doctest::Approx(p).epsilon(1e-9));
    }
  }
  SUBCASE("default output directory from the environment") {
    ::setenv("HOMDISP_OUT_DIR", tmp.path.c_str(), 1);
    const auto r = run({"simulate", config("no_module")});
    ::unsetenv("HOMDISP_OUT_DIR");
    CHECK(r.code == 0);
    CHECK(fs::exists(tmp / "no_module.curve"));
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "explicit.curve"}).code == 0);
    CHECK(fs::exists(tmp / "explicit.curve"));
  }
}

TEST_CASE("synth and replay") {
  TempDir tmp;
  SUBCASE("same seed gives identical bytes") {
    REQUIRE(run({"synth", config("no_module"), "--seed", "17", "--out", tmp / "a.curve"}).code == 0);
    REQUIRE(run({"synth", config("no_module"), "--seed", "17", "--out", tmp / "b.curve"}).code == 0);
    CHECK(read_text_file(tmp / "a.curve") == read_text_file(tmp / "b.curve"));
    REQUIRE(run({"synth", config("no_module"), "--seed", "18", "--out", tmp / "c.curve"}).code == 0);
    CHECK(read_text_file(tmp / "a.curve") != read_text_file(tmp / "c.curve"));
    CHECK(read_curve(tmp / "a.curve").seed == 17u);
  }
  SUBCASE("file seed is the default") {
    REQUIRE(run({"synth", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    CHECK(read_curve(tmp / "a.curve").seed == 1u);
  }
  SUBCASE("missing seed comes from entropy, is recorded and replays exactly") {
    const std::string text = with_replaced(config("no_module"), [](Json& j) { j.erase("rng_seed"); });
    write_text_file(tmp / "noseed.json", text);
    REQUIRE(run({"synth", tmp / "noseed.json", "--out", tmp / "a.curve"}).code == 0);
    const auto a = read_curve(tmp / "a.curve");
    REQUIRE(a.seed.has_value());
    REQUIRE(run({"replay", tmp / "a.curve", "--out", tmp / "b.curve"}).code == 0);
    CHECK(read_text_file(tmp / "a.curve") == read_text_file(tmp / "b.curve"));
  }
  SUBCASE("noiseless curves replay exactly too") {
    REQUIRE(run({"simulate", config("unbalanced_80m"), "--out", tmp / "a.curve"}).code == 0);
    REQUIRE(run({"replay", tmp / "a.curve", "--out", tmp / "b.curve"}).code == 0);
    CHECK(read_text_file(tmp / "a.curve") == read_text_file(tmp / "b.curve"));
  }
  SUBCASE("Poisson scatter follows 1/sqrt(mean)") {
    REQUIRE(run({"synth", config("no_module"), "--seed", "5", "--out", tmp / "a.curve"}).code == 0);
    const auto c = read_curve(tmp / "a.curve");
    double z2 = 0;
    for (std::size_t i = 0; i < c.delays_ps.size(); ++i) {
      const double z = ((*c.counts)[i] - c.expected[i]) / std::sqrt(c.expected[i]);
      z2 += z * z;
    }
    const double rms = std::sqrt(z2 / c.delays_ps.size());
    CHECK(rms > 0.7);
    CHECK(rms < 1.3);
  }
}

TEST_CASE("fit command") {
  TempDir tmp;
  SUBCASE("shipped balanced dataset") {
    const auto r = run({"fit", (kSource / "data" / "no_module.curve").string(), "--mc-trials", "1000"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["schema"] == "homdisp.fit-report/1");
    CHECK(j["fwhm_ps"]["value"].get<double>() == doctest::Approx(1.035).epsilon(0.01));
    CHECK(j["pulse_width_fwhm_ps"]["value"].get<double>() == doctest::Approx(0.732).epsilon(0.01));
    CHECK(j["fwhm_ps"]["sigma"].get<double>() < 0.024);
    CHECK(j["mc_trials"] == 1000);
  }
  SUBCASE("text report and file output") {
    const auto r = run({"fit", (kSource / "data" / "no_module.curve").string(), "--mc-trials", "50", "--report",
                        "text", "--out", tmp / "fit.txt"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(read_text_file(tmp / "fit.txt").find("dip fwhm") != std::string::npos);
  }
  SUBCASE("noiseless curve has negligible uncertainties") {
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    const auto r = run({"fit", tmp / "a.curve", "--mc-trials", "20"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["fwhm_ps"]["sigma"].get<double>() < 1e-9);
  }
  SUBCASE("flat curve exits with dip-not-found") {
    HomCurve flat;
    for (int i = 0; i < 41; ++i) {
      flat.delays_ps.push_back(-5 + 0.25 * i);
      flat.expected.push_back(1000.0);
    }
    write_curve(sample_counts(flat, 3), tmp / "flat.curve");
    const auto r = run({"fit", tmp / "flat.curve"});
    CHECK(r.code == kExitDipNotFound);
    CHECK(r.out.empty());
    CHECK(r.err.find("no dip") != std::string::npos);
  }
  SUBCASE("too many failed refits exits with non-convergence") {
    const std::string text = with_replaced(config("unbalanced_80m"),
                                           [](Json& j) { j["scan"]["integration_time_s"] = 0.3; });
    write_text_file(tmp / "low.json", text);
    REQUIRE(run({"synth", tmp / "low.json", "--seed", "2", "--out", tmp / "low.curve"}).code == 0);
    const auto r = run({"fit", tmp / "low.curve"});
    CHECK(r.code == kExitNonConvergence);
    CHECK(r.err.find("Monte-Carlo refits failed") != std::string::npos);
  }
  SUBCASE("fixed seeds give byte-identical reports") {
    const std::string data = (kSource / "data" / "unbalanced_80m.curve").string();
    const auto a = run({"fit", data, "--mc-trials", "200", "--seed", "9"});
    const auto b = run({"fit", data, "--mc-trials", "200", "--seed", "9"});
    CHECK(a.out == b.out);
  }
}

TEST_CASE("extract-dispersion command") {
  const std::string data = (kSource / "data" / "unbalanced_80m.curve").string();
  SUBCASE("shipped 80 m dataset") {
    const auto r = run({"extract-dispersion", data, "--t0-fwhm", "0.732", "--t0-fwhm-sigma", "0.006", "--length",
                        "80", "--wavelength", "1565"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    const double d = j["dispersion_ps_per_nm_km"]["value"].get<double>();
    const double s = j["dispersion_ps_per_nm_km"]["sigma"].get<double>();
    CHECK(std::abs(d - 15.04) / 15.04 < 0.10);
    CHECK(s > 0.48 / 2);
    CHECK(s < 0.48 * 2);
    CHECK(j["sign_observable"] == false);

    const auto r2 = run({"extract-dispersion", data, "--t0-fwhm", "0.732", "--t0-fwhm-sigma", "0.006", "--length",
                         "160", "--wavelength", "1565"});
    REQUIRE(r2.code == 0);
    const Json j2 = Json::parse(r2.out);
    CHECK(j2["dispersion_ps_per_nm_km"]["value"].get<double>() == doctest::Approx(d / 2).epsilon(1e-14));
    CHECK(j2["beta2_ps2_per_km"]["value"].get<double>() ==
          doctest::Approx(j["beta2_ps2_per_km"]["value"].get<double>() / 2).epsilon(1e-14));
  }
  SUBCASE("dip at the dispersion-free floor gives zero") {
    TempDir tmp;
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    const auto r = run({"extract-dispersion", tmp / "a.curve", "--t0-fwhm", "0.732", "--length", "80",
                        "--wavelength", "1565", "--mc-trials", "20"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["dispersion_ps_per_nm_km"]["value"].get<double>() == 0.0);
  }
  SUBCASE("dip narrower than the claimed source exits with infeasible width") {
    const auto r = run({"extract-dispersion", (kSource / "data" / "no_module.curve").string(), "--t0-fwhm", "0.9",
                        "--length", "80", "--wavelength", "1565", "--mc-trials", "50"});
    CHECK(r.code == kExitInfeasibleWidth);
  }
}

TEST_CASE("plot command") {
  TempDir tmp;
  const std::string data = (kSource / "data" / "no_module.curve").string();
  SUBCASE("curve only") {
    REQUIRE(run({"plot", data, "--out", tmp / "a.svg"}).code == 0);
    const std::string svg = read_text_file(tmp / "a.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<polyline") == std::string::npos);
  }
  SUBCASE("curve with fit overlay") {
    REQUIRE(run({"fit", data, "--mc-trials", "20", "--out", tmp / "fit.json"}).code == 0);
    REQUIRE(run({"plot", data, tmp / "fit.json", "--out", tmp / "b.svg"}).code == 0);
    const std::string svg = read_text_file(tmp / "b.svg");
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("FWHM = 1.0") != std::string::npos);
  }
  SUBCASE("empty curve is malformed input") {
    write_curve(HomCurve{}, tmp / "empty.curve");
    CHECK(run({"plot", tmp / "empty.curve", "--out", tmp / "c.svg"}).code == kExitSchema);
  }
  SUBCASE("bad fit report") {
    write_text_file(tmp / "bad.json", "{\"schema\": 3}");
    CHECK(run({"plot", data, tmp / "bad.json", "--out", tmp / "d.svg"}).code == kExitSchema);
  }
}

TEST_CASE("input validation and exit codes") {
  TempDir tmp;
  SUBCASE("usage") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"fit"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
  }
  SUBCASE("unknown key names its field path") {
    const std::string text =
        with_replaced(config("unbalanced_80m"), [](Json& j) { j["arm_a"]["elements"][0]["lenght_m"] = 3; });
    write_text_file(tmp / "bad.json", text);
    const auto r = run({"simulate", tmp / "bad.json", "--out", tmp / "x.curve"});
    CHECK(r.code == kExitSchema);
    CHECK(r.err.find("arm_a.elements[0].lenght_m") != std::string::npos);
  }
  SUBCASE("syntax error names the line") {
    write_text_file(tmp / "bad.json", "{\n  \"schema\": \"homdisp.experiment/1\",\n  \"pulse\": {,\n}");
    const auto r = run({"simulate", tmp / "bad.json", "--out", tmp / "x.curve"});
    CHECK(r.code == kExitSchema);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("out-of-range values") {
    const std::string text =
        with_replaced(config("no_module"), [](Json& j) { j["detection"]["efficiency_c"] = 1.2; });
    write_text_file(tmp / "bad.json", text);
    const auto r = run({"simulate", tmp / "bad.json", "--out", tmp / "x.curve"});
    CHECK(r.code == kExitSchema);
    CHECK(r.err.find("detection.efficiency_c") != std::string::npos);
  }
  SUBCASE("missing file") {
    CHECK(run({"simulate", tmp / "nope.json", "--out", tmp / "x.curve"}).code == kExitSchema);
    CHECK(run({"fit", tmp / "nope.curve"}).code == kExitSchema);
  }
  SUBCASE("physics error: coincidence window too short for the dispersed pulses") {
    const std::string text =
        with_replaced(config("common_50km"), [](Json& j) { j["detection"]["coincidence_window_ps"] = 2000; });
    write_text_file(tmp / "bad.json", text);
    const auto r = run({"simulate", tmp / "bad.json", "--out", tmp / "x.curve"});
    CHECK(r.code == kExitPhysics);
    CHECK(r.err.find("coincidence window") != std::string::npos);
  }
  SUBCASE("tampered curve fails its checksum") {
    REQUIRE(run({"simulate", config("no_module"), "--out", tmp / "a.curve"}).code == 0);
    std::string text = read_text_file(tmp / "a.curve");
    text[text.size() - 3] = text[text.size() - 3] == '1' ? '2' : '1';
    write_text_file(tmp / "a.curve", text);
    const auto r = run({"fit", tmp / "a.curve"});
    CHECK(r.code == kExitSchema);
    CHECK(r.err.find("checksum") != std::string::npos);
  }
}

TEST_CASE("experiment file round trip") {
  for (const char* name : {"no_module", "common_50km", "unbalanced_80m"}) {
    const ScanConfig first = load_experiment(config(name));
    const std::string dumped = dump_experiment(first);
    const ScanConfig second = parse_experiment(dumped);
    CHECK(dump_experiment(second) == dumped);
    CHECK(second.delays_ps == first.delays_ps);
    CHECK(second.pulse_a.t0_ps == first.pulse_a.t0_ps);
    CHECK(second.arm_a.gdd_ps2() == first.arm_a.gdd_ps2());
    CHECK(parse_experiment(dump_experiment(second, false)).delays_ps == first.delays_ps);
  }
  SUBCASE("distinct per-arm pulses survive") {
    ScanConfig c = load_experiment(config("no_module"));
    c.pulse_b.mean_photon_number = 0.02;
    const ScanConfig back = parse_experiment(dump_experiment(c));
    CHECK(back.pulse_b.mean_photon_number == 0.02);
    CHECK(back.pulse_a.mean_photon_number == 0.015);
  }
}

TEST_CASE("curve file round trip") {
  HomCurve c;
  c.delays_ps = {-1.0 / 3.0, 0.1, 2.5e-7};
  c.expected = {1e-300, 12345.678901234567, 0.0};
  c.counts = std::vector<std::int64_t>{0, 12346, 9};
  c.seed = 18446744073709551615ull;
  c.config_echo = "{\"a\":1}";
  const HomCurve back = parse_curve(format_curve(c));
  CHECK(back.delays_ps == c.delays_ps);
  CHECK(back.expected == c.expected);
  CHECK(*back.counts == *c.counts);
  CHECK(back.seed == c.seed);
  CHECK(back.config_echo == c.config_echo);
  CHECK(format_curve(back) == format_curve(c));

  HomCurve bare;
  bare.delays_ps = {0.0};
  bare.expected = {1.0};
  const HomCurve b2 = parse_curve(format_curve(bare));
  CHECK_FALSE(b2.counts.has_value());
  CHECK_FALSE(b2.seed.has_value());
  CHECK(b2.config_echo.empty());

  CHECK_THROWS_AS(parse_curve("# homdisp-curve v2\n"), SchemaError);
  std::string broken = format_curve(c);
  broken += "1 2\n";
  CHECK_THROWS_AS(parse_curve(broken), SchemaError);
}
