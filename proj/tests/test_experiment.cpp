#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "homdisp/error.hpp"
#include "homdisp/experiment.hpp"
#include "homdisp/units.hpp"

using namespace homdisp;

namespace {

ScanConfig balanced_config() {
  ScanConfig c;
  c.pulse_a = GaussianPulse::from_fwhm(0.732, 1565.0, 0.015);
  c.pulse_b = c.pulse_a;
  c.delays_ps = default_delay_grid(c.arm_a, c.arm_b, c.pulse_a.t0_ps);
  return c;
}

TemporalProfile gaussian_profile(double fwhm, double dt, std::size_t n) {
  TemporalProfile p;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) - 0.5 * static_cast<double>(n - 1)) * dt;
    p.times_ps.push_back(t);
    p.intensity.push_back(std::exp(-0.5 * t * t / (sigma * sigma)));
  }
  return p;
}

}  // namespace

TEST_CASE("expected curve") {
  const ScanConfig c = balanced_config();
  const double trials = 5e6 * 10.0;
  const double baseline = 0.68 * 0.68 * 0.015 * 0.015 * trials;

  SUBCASE("default grid: 41 points over +-3 dip widths") {
    REQUIRE(c.delays_ps.size() == 41);
    const double d = std::sqrt(2.0) * 0.732;
    CHECK(c.delays_ps.front() == doctest::Approx(-3 * d).epsilon(1e-12));
    CHECK(c.delays_ps.back() == doctest::Approx(3 * d).epsilon(1e-12));
    CHECK(c.delays_ps[20] == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("baseline far from the dip and the half-depth floor at its center") {
    ScanConfig far = c;
    far.delays_ps = {-50.0, 0.0, 50.0};
    const auto curve = expected_curve(far);
    CHECK(curve.expected[0] == doctest::Approx(baseline).epsilon(1e-9));
    CHECK(curve.expected[2] == doctest::Approx(baseline).epsilon(1e-9));
    CHECK(curve.expected[1] == doctest::Approx(baseline / 2).epsilon(1e-9));
    CHECK_FALSE(curve.counts.has_value());
  }
  SUBCASE("expected counts are linear in integration time") {
    ScanConfig twice = c;
    twice.integration_time_s *= 2;
    const auto a = expected_curve(c);
    const auto b = expected_curve(twice);
    for (std::size_t i = 0; i < a.expected.size(); ++i)
      CHECK(b.expected[i] == doctest::Approx(2 * a.expected[i]).epsilon(1e-12));
  }
  SUBCASE("a common 50 km spool leaves the curve unchanged") {
    ScanConfig spool = c;
    const auto e = DispersiveElement::from_dispersion_parameter(50000.0, 4896.0, 17.1, 1565.0);
    spool.arm_a.elements.push_back(e);
    spool.arm_b.elements.push_back(e);
    const auto a = expected_curve(c);
    const auto b = expected_curve(spool);
    for (std::size_t i = 0; i < a.expected.size(); ++i)
      CHECK(std::abs(b.expected[i] - a.expected[i]) < 1e-9 * baseline);
  }
  SUBCASE("validation") {
    ScanConfig bad = c;
    bad.efficiency_c = 1.5;
    CHECK_THROWS_AS(expected_curve(bad), InvalidArgument);
    bad = c;
    bad.delays_ps = {0.0, 0.0};
    CHECK_THROWS_AS(expected_curve(bad), InvalidArgument);
    bad = c;
    bad.delays_ps.clear();
    CHECK_THROWS_AS(expected_curve(bad), InvalidArgument);
    bad = c;
    bad.integration_time_s = 0;
    CHECK_THROWS_AS(expected_curve(bad), InvalidArgument);
    bad = c;
    bad.pulse_b.center_wavelength_nm = 1550;
    CHECK_THROWS_AS(expected_curve(bad), InvalidArgument);
  }
  SUBCASE("coincidence window must cover the dispersed pulses but not the period") {
    ScanConfig spool = c;
    const auto e = DispersiveElement::from_dispersion_parameter(50000.0, 4896.0, 17.1, 1565.0);
    spool.arm_a.elements.push_back(e);
    spool.arm_b.elements.push_back(e);
    spool.coincidence_window_ps = 5000.0;
    CHECK_THROWS_AS(expected_curve(spool), InvalidArgument);
    spool.coincidence_window_ps = 25000.0;
    CHECK_NOTHROW(expected_curve(spool));
    spool.coincidence_window_ps = 300000.0;
    CHECK_THROWS_AS(expected_curve(spool), InvalidArgument);
  }
}

TEST_CASE("Poisson sampling") {
  HomCurve curve;
  for (int i = 0; i < 1000; ++i) {
    curve.delays_ps.push_back(i);
    curve.expected.push_back(1e4);
  }

  SUBCASE("sample mean and variance") {
    const auto s = sample_counts(curve, 99);
    const auto& k = *s.counts;
    const double mean = std::accumulate(k.begin(), k.end(), 0.0) / k.size();
    double var = 0;
    for (auto v : k) var += (v - mean) * (v - mean);
    var /= (k.size() - 1);
    CHECK(std::abs(mean - 1e4) < 300.0);
    // Standard error of the mean is 100/sqrt(1000).
    CHECK(std::abs(mean - 1e4) < 5 * 100.0 / std::sqrt(1000.0));
    CHECK(var == doctest::Approx(1e4).epsilon(0.15));
    CHECK(s.seed == 99u);
  }
  SUBCASE("zero expectation always yields zero") {
    HomCurve zero{{0.0, 1.0}, {0.0, 0.0}, std::nullopt, std::nullopt, ""};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = sample_counts(zero, seed);
      CHECK((*s.counts)[0] == 0);
      CHECK((*s.counts)[1] == 0);
    }
  }
  SUBCASE("deterministic per seed and independent of the other points") {
    const auto a = sample_counts(curve, 12345);
    const auto b = sample_counts(curve, 12345);
    CHECK(*a.counts == *b.counts);
    const auto c = sample_counts(curve, 12346);
    CHECK(*a.counts != *c.counts);

    HomCurve prefix = curve;
    prefix.delays_ps.resize(10);
    prefix.expected.resize(10);
    const auto p = sample_counts(prefix, 12345);
    for (std::size_t i = 0; i < 10; ++i) CHECK((*p.counts)[i] == (*a.counts)[i]);
  }
  SUBCASE("negative expectation is rejected") {
    HomCurve bad{{0.0}, {-1.0}, std::nullopt, std::nullopt, ""};
    CHECK_THROWS_AS(sample_counts(bad, 1), InvalidArgument);
  }
}

TEST_CASE("timing jitter convolution") {
  SUBCASE("zero jitter is the identity") {
    const auto p = gaussian_profile(100.0, 1.0, 1024);
    const auto q = jitter_convolved_profile(p, 0.0);
    CHECK(q.intensity == p.intensity);
  }
  SUBCASE("Gaussian widths add in quadrature and area is preserved") {
    for (double w : {50.0, 200.0, 900.0}) {
      const auto p = gaussian_profile(w, 2.0, 4096);
      const auto q = jitter_convolved_profile(p, 270.0);
      CHECK(q.fwhm() == doctest::Approx(std::hypot(w, 270.0)).epsilon(0.01));
      CHECK(q.photon_number() == doctest::Approx(p.photon_number()).epsilon(1e-9));
    }
  }
  SUBCASE("a 3.68 ns pulse is barely changed by 270 ps of jitter") {
    const auto p = gaussian_profile(3680.0, 5.0, 8192);
    const double w = jitter_convolved_profile(p, 270.0).fwhm();
    CHECK(w == doctest::Approx(3690.0).epsilon(0.001));
    CHECK(std::abs(w - 4100.0) / 4100.0 < 0.15);
  }
  SUBCASE("a 1 ps pulse takes the jitter width") {
    const auto p = gaussian_profile(1.0, 0.1, 1 << 15);
    CHECK(jitter_convolved_profile(p, 270.0).fwhm() == doctest::Approx(270.0).epsilon(0.01));
  }
  SUBCASE("negative jitter is rejected") {
    CHECK_THROWS_AS(jitter_convolved_profile(gaussian_profile(1.0, 0.1, 64), -1.0), InvalidArgument);
  }
}

TEST_CASE("detected pulse through 50 km of fiber") {
  const auto pulse = GaussianPulse::from_fwhm(0.732, 1565.0);
  const ArmConfig spool{{DispersiveElement::from_dispersion_parameter(50000.0, 4896.0, 17.1, 1565.0)}};
  const auto bare = detected_pulse_profile(pulse, spool, 0.0);
  const double gdd = spool.gdd_ps2();
  CHECK(bare.fwhm() == doctest::Approx(broadened_width_closed_form(pulse.t0_ps, gdd)).epsilon(1e-3));
  const auto seen = detected_pulse_profile(pulse, spool, 270.0);
  CHECK(seen.fwhm() == doctest::Approx(std::hypot(bare.fwhm(), 270.0)).epsilon(1e-3));
}

TEST_CASE("singles rates") {
  ScanConfig c = balanced_config();
  c.integration_time_s = 1.0;
  const auto [sc, sd] = singles_rates(c);
  CHECK(sc == doctest::Approx(0.68 * 0.015 * 5e6).epsilon(1e-12));
  CHECK(sd == doctest::Approx(5.1e4).epsilon(1e-12));

  ScanConfig dark = c;
  dark.efficiency_c = 0.0;
  dark.efficiency_d = 0.0;
  CHECK(singles_rates(dark).first == 0.0);
  CHECK(singles_rates(dark).second == 0.0);

  ScanConfig moved = c;
  for (auto& t : moved.delays_ps) t += 7.0;
  CHECK(singles_rates(moved) == singles_rates(c));
}
