#include "homdisp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "homdisp/error.hpp"

namespace homdisp {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

}  // namespace

std::string render_dip_svg(const HomCurve& curve, const std::optional<DipModel>& fit) {
  curve.validate();
  if (curve.delays_ps.empty()) throw InvalidArgument("cannot plot an empty curve");
  const auto y = curve.observed();

  double x0 = curve.delays_ps.front(), x1 = curve.delays_ps.back();
  if (x1 == x0) {
    x0 -= 1;
    x1 += 1;
  }
  double y1 = *std::max_element(y.begin(), y.end());
  if (fit) y1 = std::max(y1, fit->baseline);
  y1 = y1 > 0 ? 1.1 * y1 : 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - v / y1) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<g stroke=\"black\" fill=\"none\"><rect x=\"" + fmt("%.2f", kLeft) + "\" y=\"" + fmt("%.2f", kTop) +
       "\" width=\"" + fmt("%.2f", pw) + "\" height=\"" + fmt("%.2f", ph) + "\"/></g>\n";

  s += "<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    s += "<text x=\"" + fmt("%.2f", px(xv)) + "\" y=\"" + fmt("%.2f", kTop + ph + 16) + "\">" + fmt("%.3g", xv) +
         "</text>\n";
    const double yv = y1 * i / 4.0;
    s += "<text x=\"" + fmt("%.2f", kLeft - 30) + "\" y=\"" + fmt("%.2f", py(yv) + 4) + "\">" + fmt("%.3g", yv) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", kLeft + pw / 2) + "\" y=\"" + fmt("%.2f", kHeight - 10) +
       "\">delay (ps)</text>\n";
  s += "<text transform=\"rotate(-90)\" x=\"" + fmt("%.2f", -(kTop + ph / 2)) + "\" y=\"14\">coincidences</text>\n";
  s += "</g>\n";

  s += "<g fill=\"#1f4e9c\">\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += "<circle cx=\"" + fmt("%.2f", px(curve.delays_ps[i])) + "\" cy=\"" + fmt("%.2f", py(y[i])) +
         "\" r=\"3\"/>\n";
  }
  s += "</g>\n";

  if (fit) {
    s += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      const double x = x0 + (x1 - x0) * i / n;
      s += fmt("%.2f", px(x)) + "," + fmt("%.2f", py((*fit)(x))) + (i < n ? " " : "");
    }
    s += "\"/>\n";
    s += "<text font-family=\"sans-serif\" font-size=\"12\" x=\"" + fmt("%.2f", kLeft + 10) + "\" y=\"" +
         fmt("%.2f", kTop + 18) + "\">FWHM = " + fmt("%.4g", fit->fwhm_ps()) + " ps</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace homdisp
