#include "homdisp/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "homdisp/error.hpp"
#include "homdisp/hom_core.hpp"
#include "homdisp/random.hpp"
#include "homdisp/units.hpp"
#include "homdisp/wavepacket.hpp"

namespace homdisp {
namespace {

using Vec4 = Eigen::Vector4d;

// FWHM over sigma for exp(-x^2 / (2 sigma^2)).
const double kSigmaToFwhm = 2.0 * std::sqrt(2.0 * std::log(2.0));
using Mat4 = Eigen::Matrix4d;

Vec4 to_vec(const DipModel& m) { return {m.baseline, m.visibility, m.center_ps, m.sigma_ps}; }

DipModel from_vec(const Vec4& p) { return {p[0], p[1], p[2], std::abs(p[3])}; }

struct Normal {
  Mat4 jtj = Mat4::Zero();
  Vec4 jtr = Vec4::Zero();
  double chi2 = 0;
};

Normal normal_equations(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w, const Vec4& p) {
  Normal n;
  const double b = p[0], v = p[1], c = p[2], s = p[3];
  const double s2 = s * s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - c;
    const double g = std::exp(-0.5 * u * u / s2);
    const double model = b * (1.0 - v * g);
    const double r = y[i] - model;
    Vec4 j;
    j[0] = 1.0 - v * g;
    j[1] = -b * g;
    j[2] = -b * v * g * u / s2;
    j[3] = -b * v * g * u * u / (s2 * s);
    n.jtj.noalias() += w[i] * j * j.transpose();
    n.jtr.noalias() += w[i] * r * j;
    n.chi2 += w[i] * r * r;
  }
  return n;
}

double chi2_of(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
               const Vec4& p) {
  const DipModel m = from_vec(p);
  double chi2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - m(x[i]);
    chi2 += w[i] * r * r;
  }
  return chi2;
}

FitResult fit_values(const std::vector<double>& x, const std::vector<double>& y, const DipModel& guess) {
  const std::size_t n = x.size();
  if (n < 6) throw InvalidArgument("dip fit needs at least 6 points, got " + std::to_string(n));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] >= 0) || !std::isfinite(y[i])) throw InvalidArgument("curve values must be finite and >= 0");
    w[i] = 1.0 / std::max(y[i], 1.0);
  }
  if (!(guess.sigma_ps > 0)) throw InvalidArgument("initial dip width must be > 0");

  Vec4 p = to_vec(guess);
  Normal ne = normal_equations(x, y, w, p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  const double scale_floor = 1e-300;
  while (iter < kFitIterationCap) {
    ++iter;
    if (ne.chi2 == 0.0) {
      converged = true;
      break;
    }
    bool accepted = false;
    Vec4 step = Vec4::Zero();
    while (!accepted) {
      Mat4 a = ne.jtj;
      for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(ne.jtj(k, k), scale_floor);
      step = a.ldlt().solve(ne.jtr);
      if (!step.allFinite()) {
        lambda *= 10;
      } else {
        Vec4 trial = p + step;
        trial[3] = std::abs(trial[3]);
        const double chi2 = chi2_of(x, y, w, trial);
        if (chi2 <= ne.chi2) {
          p = trial;
          lambda = std::max(lambda / 10, 1e-12);
          accepted = true;
        } else {
          lambda *= 10;
        }
      }
      // No downhill step left at this precision: the current point is the minimum.
      if (!accepted && lambda > 1e16) break;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    ne = normal_equations(x, y, w, p);
    double rel = 0;
    for (int k = 0; k < 4; ++k) rel = std::max(rel, std::abs(step[k]) / std::max(std::abs(p[k]), 1e-12));
    if (rel < kFitRelativeStep) {
      converged = true;
      break;
    }
  }

  FitResult out;
  out.direct = from_vec(p);
  out.estimate = out.direct;
  out.iterations = iter;
  out.n_points = n;
  out.residual_norm = std::sqrt(ne.chi2);
  out.chi2_reduced = ne.chi2 / static_cast<double>(n - 4);
  out.fwhm_ps = out.estimate.fwhm_ps();

  const Eigen::FullPivLU<Mat4> lu(ne.jtj);
  Vec4 sig = Vec4::Constant(std::numeric_limits<double>::infinity());
  if (lu.isInvertible()) {
    const Mat4 cov = lu.inverse() * out.chi2_reduced;
    for (int k = 0; k < 4; ++k) sig[k] = std::sqrt(std::max(cov(k, k), 0.0));
  }
  out.uncertainty = {sig[0], sig[1], sig[2], sig[3]};
  out.fwhm_uncertainty_ps = kSigmaToFwhm * sig[3];

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const DipModel& m = out.estimate;
  if (!(m.visibility > 1e-9) || !(m.visibility >= 3.0 * sig[1]) || m.center_ps < *lo || m.center_ps > *hi) {
    throw DipNotFound("no dip: visibility " + std::to_string(m.visibility) + " +- " +
                      std::to_string(sig[1]) + ", center " + std::to_string(m.center_ps) + " ps");
  }
  if (!converged) {
    throw NonConvergence("dip fit did not converge within " + std::to_string(kFitIterationCap) +
                         " iterations");
  }
  return out;
}

struct Moments {
  double mean = 0, m2 = 0;
  int n = 0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

}  // namespace

double DipModel::operator()(double tau_ps) const {
  const double u = tau_ps - center_ps;
  return baseline * (1.0 - visibility * std::exp(-0.5 * u * u / (sigma_ps * sigma_ps)));
}

double DipModel::fwhm_ps() const { return kSigmaToFwhm * sigma_ps; }

DipModel initial_guess_for(const HomCurve& curve) {
  const auto y = curve.observed();
  if (y.empty()) throw InvalidArgument("curve is empty");
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  if (!(*mx > 0)) throw DipNotFound("curve has no counts");
  const double span = curve.delays_ps.back() - curve.delays_ps.front();
  return {*mx, 1.0 - *mn / *mx, curve.delays_ps[static_cast<std::size_t>(mn - y.begin())], span / 6.0};
}

FitResult fit_gaussian_dip(const HomCurve& curve, const std::optional<DipModel>& initial_guess) {
  curve.validate();
  if (curve.delays_ps.size() < 6)
    throw InvalidArgument("dip fit needs at least 6 points, got " + std::to_string(curve.delays_ps.size()));
  return fit_values(curve.delays_ps, curve.observed(), initial_guess ? *initial_guess : initial_guess_for(curve));
}

FitResult monte_carlo_fit(const HomCurve& curve, int trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw InvalidArgument("Monte-Carlo needs at least one trial");
  const FitResult base = fit_gaussian_dip(curve);
  const std::vector<double> y = curve.observed();
  const std::size_t n = y.size();

  std::vector<std::optional<DipModel>> results(static_cast<std::size_t>(trials));
  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> sample(n);
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t trial_seed = substream_seed(seed, t);
      for (std::size_t i = 0; i < n; ++i) {
        sample[i] = curve.counts ? static_cast<double>(poisson_draw(y[i], substream_seed(trial_seed, i))) : y[i];
      }
      try {
        results[t] = fit_values(curve.delays_ps, sample, base.direct).estimate;
      } catch (const Error&) {
        results[t].reset();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
  if (threads <= 1) {
    run(0, results.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (results.size() + threads - 1) / threads;
    for (std::size_t b = 0; b < results.size(); b += chunk)
      pool.emplace_back(run, b, std::min(results.size(), b + chunk));
    for (auto& th : pool) th.join();
  }

  Moments mb, mv, mc, ms, mf;
  int failures = 0;
  for (const auto& r : results) {
    if (!r) {
      ++failures;
      continue;
    }
    mb.add(r->baseline);
    mv.add(r->visibility);
    mc.add(r->center_ps);
    ms.add(r->sigma_ps);
    mf.add(r->fwhm_ps());
  }
  if (failures > 0.05 * trials) {
    throw NonConvergence(std::to_string(failures) + " of " + std::to_string(trials) +
                         " Monte-Carlo refits failed (limit 5%)");
  }

  FitResult out = base;
  out.estimate = {mb.mean, mv.mean, mc.mean, ms.mean};
  out.uncertainty = {mb.stddev(), mv.stddev(), mc.stddev(), ms.stddev()};
  out.fwhm_ps = mf.mean;
  out.fwhm_uncertainty_ps = mf.stddev();
  out.n_mc_trials = trials;
  out.mc_failures = failures;
  out.uncertainties_defined = mf.n > 1;
  return out;
}

double pulse_width_from_dip(double dip_fwhm_ps) {
  if (!(dip_fwhm_ps > 0) || !std::isfinite(dip_fwhm_ps)) throw InvalidArgument("dip FWHM must be > 0");
  return dip_fwhm_ps / std::sqrt(2.0);
}

DispersionEstimate dispersion_from_dip(double dip_fwhm_ps, double dip_fwhm_sigma_ps, double t0_ps,
                                       double t0_sigma_ps, double length_m, double wavelength_nm,
                                       int mc_trials, std::uint64_t seed) {
  if (!(length_m > 0) || !std::isfinite(length_m)) throw InvalidArgument("length must be > 0");
  if (!(wavelength_nm > 0) || !std::isfinite(wavelength_nm)) throw InvalidArgument("wavelength must be > 0");
  if (!(dip_fwhm_sigma_ps >= 0) || !(t0_sigma_ps >= 0)) throw InvalidArgument("uncertainties must be >= 0");
  if (mc_trials < 0) throw InvalidArgument("Monte-Carlo trial count must be >= 0");

  DispersionEstimate est;
  est.dip_fwhm_ps = dip_fwhm_ps;
  est.dip_fwhm_sigma_ps = dip_fwhm_sigma_ps;
  est.t0_ps = t0_ps;
  est.t0_sigma_ps = t0_sigma_ps;
  est.length_m = length_m;
  est.wavelength_nm = wavelength_nm;
  est.mc_trials = mc_trials;

  const double length_km = units::meters_to_km(length_m);
  // |D| per unit |beta2|; linear, so relative errors carry over exactly.
  const double d_per_beta2 = std::abs(beta2_to_dispersion_parameter(1.0, wavelength_nm));

  if (!(t0_ps > 0)) throw InvalidArgument("T0 must be > 0");
  const double floor = min_dip_fwhm(t0_ps);
  // Below the floor but within the width's own noise reads as alpha = 0.
  const double tolerance = std::max(dip_fwhm_sigma_ps, kFloorTolerance * floor);
  if (dip_fwhm_ps < floor && dip_fwhm_ps >= floor - tolerance) {
    est.alpha_ps2 = 0.0;
  } else {
    est.alpha_ps2 = extract_alpha_from_fwhm(dip_fwhm_ps, t0_ps);
  }
  est.beta2_ps2_per_km = est.alpha_ps2 / length_km;
  est.d_ps_per_nm_km = est.beta2_ps2_per_km * d_per_beta2;
  est.near_boundary = dip_fwhm_ps - dip_fwhm_sigma_ps <= floor;

  auto alpha_at = [&](double d, double t0, int& hits) {
    if (!(t0 > 0)) {
      ++hits;
      return 0.0;
    }
    if (d < min_dip_fwhm(t0)) {
      ++hits;
      return 0.0;
    }
    return extract_alpha_from_fwhm(d, t0);
  };

  Moments both, width_only, t0_only;
  int hits = 0, ignored = 0;
  for (int k = 0; k < mc_trials; ++k) {
    const std::uint64_t s = substream_seed(seed, static_cast<std::uint64_t>(k));
    const double zd = normal_draw(substream_seed(s, 0));
    const double zt = normal_draw(substream_seed(s, 1));
    const double d = dip_fwhm_ps + dip_fwhm_sigma_ps * zd;
    const double t0 = t0_ps + t0_sigma_ps * zt;
    both.add(alpha_at(d, t0, hits));
    width_only.add(alpha_at(d, t0_ps, ignored));
    t0_only.add(alpha_at(dip_fwhm_ps, t0, ignored));
  }
  est.boundary_hits = hits;
  est.alpha_sigma = both.stddev();
  est.beta2_sigma = est.alpha_sigma / length_km;
  est.d_sigma = est.beta2_sigma * d_per_beta2;
  est.d_sigma_from_width = width_only.stddev() / length_km * d_per_beta2;
  est.d_sigma_from_t0 = t0_only.stddev() / length_km * d_per_beta2;
  return est;
}

}  // namespace homdisp
