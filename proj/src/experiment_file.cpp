#include "homdisp/experiment_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "homdisp/error.hpp"
#include "json.hpp"

namespace homdisp {
namespace {

using Json = nlohmann::ordered_json;

// Walks one JSON object, tracking the field path for diagnostics and
// rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(child(key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) fail(child(key), "missing required field");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(child(key), "must be finite");
    return x;
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }

  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0)) fail(child(key), "must be > 0");
    return x;
  }

  double non_negative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x >= 0)) fail(child(key), "must be >= 0");
    return x;
  }

  double fraction(const std::string& key) {
    const double x = number(key);
    if (!(x >= 0 && x <= 1)) fail(child(key), "must lie in [0, 1]");
    return x;
  }

  std::uint64_t seed(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      fail(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw SchemaError((path.empty() ? std::string("<root>") : path) + ": " + what);
  }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

GaussianPulse read_pulse(const Json& node, const std::string& path) {
  ObjectReader r(node, path);
  GaussianPulse p;
  if (r.has("fwhm_ps") == r.has("t0_ps")) ObjectReader::fail(path, "give exactly one of fwhm_ps or t0_ps");
  p.center_wavelength_nm = r.positive("center_wavelength_nm");
  p.mean_photon_number = r.non_negative("mean_photon_number", 1.0);
  p.source_g2 = r.non_negative("g2", 1.0);
  if (r.has("fwhm_ps")) {
    p = GaussianPulse::from_fwhm(r.positive("fwhm_ps"), p.center_wavelength_nm, p.mean_photon_number,
                                 p.source_g2);
  } else {
    p.t0_ps = r.positive("t0_ps");
  }
  return p;
}

DispersiveElement read_element(const Json& node, const std::string& path, double carrier_nm) {
  ObjectReader r(node, path);
  if (r.has("name")) r.string("name");
  if (!r.has("length_m")) ObjectReader::fail(r.child("length_m"), "missing required field");
  const double length = r.non_negative("length_m", 0.0);
  const double beta1 = r.number("beta1_ps_per_m", 0.0);
  const bool by_beta2 = r.has("beta2_ps2_per_km");
  const bool by_d = r.has("dispersion_ps_per_nm_km");
  if (by_beta2 == by_d)
    ObjectReader::fail(path, "give exactly one of beta2_ps2_per_km or dispersion_ps_per_nm_km");
  DispersiveElement e;
  if (by_d) {
    const double ref = r.has("reference_wavelength_nm") ? r.positive("reference_wavelength_nm") : carrier_nm;
    e = DispersiveElement::from_dispersion_parameter(length, beta1, r.number("dispersion_ps_per_nm_km"), ref);
  } else {
    if (r.has("reference_wavelength_nm"))
      ObjectReader::fail(r.child("reference_wavelength_nm"), "only valid with dispersion_ps_per_nm_km");
    e = DispersiveElement{length, beta1, r.number("beta2_ps2_per_km"), 0.0};
  }
  e.beta3_ps3_per_km = r.number("beta3_ps3_per_km", 0.0);
  return e;
}

ArmConfig read_arm(const Json& node, const std::string& path, double carrier_nm, GaussianPulse& pulse) {
  ObjectReader r(node, path);
  ArmConfig arm;
  const Json& list = r.raw("elements");
  if (!list.is_array()) ObjectReader::fail(r.child("elements"), "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    arm.elements.push_back(read_element(list[i], r.child("elements") + "[" + std::to_string(i) + "]", carrier_nm));
  }
  if (r.has("pulse")) pulse = read_pulse(r.raw("pulse"), r.child("pulse"));
  return arm;
}

ScanConfig from_json(const Json& root) {
  ObjectReader r(root, "");
  const std::string schema = r.string("schema");
  if (schema != kExperimentSchema)
    ObjectReader::fail("schema", "unsupported schema '" + schema + "', expected '" + kExperimentSchema + "'");

  ScanConfig c;
  c.pulse_a = read_pulse(r.raw("pulse"), "pulse");
  c.pulse_b = c.pulse_a;
  const double carrier = c.pulse_a.center_wavelength_nm;
  c.arm_a = read_arm(r.raw("arm_a"), "arm_a", carrier, c.pulse_a);
  c.arm_b = read_arm(r.raw("arm_b"), "arm_b", carrier, c.pulse_b);
  if (c.pulse_a.center_wavelength_nm != c.pulse_b.center_wavelength_nm)
    ObjectReader::fail("arm_b.pulse.center_wavelength_nm", "both arms must share one carrier wavelength");

  {
    ObjectReader d(r.raw("detection"), "detection");
    c.efficiency_c = d.fraction("efficiency_c");
    c.efficiency_d = d.fraction("efficiency_d");
    c.timing_jitter_fwhm_ps = d.non_negative("timing_jitter_fwhm_ps", 0.0);
    c.coincidence_window_ps = d.positive("coincidence_window_ps");
  }
  {
    ObjectReader s(r.raw("scan"), "scan");
    c.repetition_rate_hz = s.positive("repetition_rate_hz");
    c.integration_time_s = s.positive("integration_time_s");
    const bool explicit_delays = s.has("delays_ps");
    if (explicit_delays == s.has("delay_grid"))
      ObjectReader::fail("scan", "give exactly one of delays_ps or delay_grid");
    if (explicit_delays) {
      const Json& list = s.raw("delays_ps");
      if (!list.is_array()) ObjectReader::fail("scan.delays_ps", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "scan.delays_ps[" + std::to_string(i) + "]";
        if (!list[i].is_number()) ObjectReader::fail(p, "expected a number");
        c.delays_ps.push_back(list[i].get<double>());
        if (!std::isfinite(c.delays_ps.back())) ObjectReader::fail(p, "must be finite");
        if (i > 0 && !(c.delays_ps[i] > c.delays_ps[i - 1])) ObjectReader::fail(p, "delays must be strictly increasing");
      }
      if (c.delays_ps.empty()) ObjectReader::fail("scan.delays_ps", "must not be empty");
    } else {
      ObjectReader g(s.raw("delay_grid"), "scan.delay_grid");
      const double points = g.number("points", 41);
      if (!(points >= 2) || points != std::floor(points) || points > 1e6)
        ObjectReader::fail("scan.delay_grid.points", "must be an integer >= 2");
      const double half = g.number("half_width_in_dips", 3.0);
      if (!(half > 0)) ObjectReader::fail("scan.delay_grid.half_width_in_dips", "must be > 0");
      c.delays_ps = default_delay_grid(c.arm_a, c.arm_b, std::min(c.pulse_a.t0_ps, c.pulse_b.t0_ps),
                                       static_cast<std::size_t>(points), half);
    }
  }
  if (r.has("rng_seed")) c.rng_seed = r.seed("rng_seed");

  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

Json pulse_json(const GaussianPulse& p) {
  Json j;
  j["t0_ps"] = p.t0_ps;
  j["center_wavelength_nm"] = p.center_wavelength_nm;
  j["mean_photon_number"] = p.mean_photon_number;
  j["g2"] = p.source_g2;
  return j;
}

Json arm_json(const ArmConfig& arm, const GaussianPulse* override_pulse) {
  Json j;
  j["elements"] = Json::array();
  for (const auto& e : arm.elements) {
    Json el;
    el["length_m"] = e.length_m;
    el["beta1_ps_per_m"] = e.beta1_ps_per_m;
    el["beta2_ps2_per_km"] = e.beta2_ps2_per_km;
    el["beta3_ps3_per_km"] = e.beta3_ps3_per_km;
    j["elements"].push_back(el);
  }
  if (override_pulse) j["pulse"] = pulse_json(*override_pulse);
  return j;
}

bool same_pulse(const GaussianPulse& a, const GaussianPulse& b) {
  return a.t0_ps == b.t0_ps && a.center_wavelength_nm == b.center_wavelength_nm &&
         a.mean_photon_number == b.mean_photon_number && a.source_g2 == b.source_g2;
}

}  // namespace

ScanConfig parse_experiment(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("syntax error: ") + e.what());
  }
  try {
    return from_json(root);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  }
}

ScanConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string dump_experiment(const ScanConfig& c, bool pretty) {
  Json root;
  root["schema"] = kExperimentSchema;
  root["pulse"] = pulse_json(c.pulse_a);
  root["arm_a"] = arm_json(c.arm_a, nullptr);
  root["arm_b"] = arm_json(c.arm_b, same_pulse(c.pulse_a, c.pulse_b) ? nullptr : &c.pulse_b);
  root["detection"] = {{"efficiency_c", c.efficiency_c},
                       {"efficiency_d", c.efficiency_d},
                       {"timing_jitter_fwhm_ps", c.timing_jitter_fwhm_ps},
                       {"coincidence_window_ps", c.coincidence_window_ps}};
  root["scan"] = {{"repetition_rate_hz", c.repetition_rate_hz},
                  {"integration_time_s", c.integration_time_s},
                  {"delays_ps", c.delays_ps}};
  if (c.rng_seed) root["rng_seed"] = *c.rng_seed;
  return pretty ? root.dump(2) + "\n" : root.dump();
}

}  // namespace homdisp
