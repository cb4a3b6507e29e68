#pragma once

// Static log-log scatter plots: points, a fitted power law and a dashed
// reference line with the claimed slope through the same centroid.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bnlab {

struct LogLogSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<double> fitted_slope;
  std::optional<double> fitted_log_prefactor;  // log y = c + slope log x
  std::optional<double> claimed_slope;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b"};

}  // namespace detail

/// Renders every series on one pair of log axes. Non-positive points are
/// skipped.
inline std::string render_loglog_svg(const std::string& title, const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<LogLogSeries>& series) {
  constexpr double W = 720, H = 480, L = 80, R = 200, T = 40, B = 60;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i])), x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, std::log10(s.y[i])), y_hi = std::max(y_hi, std::log10(s.y[i]));
    }
  if (!(x_lo <= x_hi)) x_lo = -1, x_hi = 0, y_lo = -1, y_hi = 0;
  x_lo = std::floor(x_lo), x_hi = std::ceil(x_hi);
  y_lo = std::floor(y_lo), y_hi = std::ceil(y_hi);
  if (x_hi == x_lo) x_hi += 1;
  if (y_hi == y_lo) y_hi += 1;
  const auto px = [&](double lx) { return L + (lx - x_lo) / (x_hi - x_lo) * (W - L - R); };
  const auto py = [&](double ly) { return H - B - (ly - y_lo) / (y_hi - y_lo) * (H - T - B); };
  const auto clip_y = [&](double ly) { return std::clamp(ly, y_lo, y_hi); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << detail::escape_xml(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int x_step = std::max(1, static_cast<int>((x_hi - x_lo) / 8));
  for (int k = static_cast<int>(x_lo); k <= static_cast<int>(x_hi); k += x_step)
    o << "<text x=\"" << detail::fmt(px(k)) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\">1e" << k << "</text>\n";
  const int y_step = std::max(1, static_cast<int>((y_hi - y_lo) / 10));
  for (int k = static_cast<int>(y_lo); k <= static_cast<int>(y_hi); k += y_step)
    o << "<text x=\"" << L - 6 << "\" y=\"" << detail::fmt(py(k) + 4)
      << "\" text-anchor=\"end\">1e" << k << "</text>\n";
  o << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\">" << detail::escape_xml(x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << T + (H - T - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape_xml(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = detail::kPalette[si % std::size(detail::kPalette)];
    double sx = 0, sy = 0;
    int count = 0;
    double sx_lo = std::numeric_limits<double>::infinity(), sx_hi = -sx_lo;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      const double lx = std::log10(s.x[i]), ly = std::log10(s.y[i]);
      sx += lx, sy += ly, ++count;
      sx_lo = std::min(sx_lo, lx), sx_hi = std::max(sx_hi, lx);
      o << "<circle cx=\"" << detail::fmt(px(lx)) << "\" cy=\"" << detail::fmt(py(ly))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    if (count >= 2 && s.fitted_slope && s.fitted_log_prefactor) {
      const double c = *s.fitted_log_prefactor / std::log(10.0);
      const auto fy = [&](double lx) { return clip_y(c + *s.fitted_slope * lx); };
      o << "<line x1=\"" << detail::fmt(px(sx_lo)) << "\" y1=\"" << detail::fmt(py(fy(sx_lo)))
        << "\" x2=\"" << detail::fmt(px(sx_hi)) << "\" y2=\"" << detail::fmt(py(fy(sx_hi)))
        << "\" stroke=\"" << color << "\"/>\n";
    }
    if (count >= 2 && s.claimed_slope) {
      const double mx = sx / count, my = sy / count;
      const auto ry = [&](double lx) { return clip_y(my + *s.claimed_slope * (lx - mx)); };
      o << "<line x1=\"" << detail::fmt(px(sx_lo)) << "\" y1=\"" << detail::fmt(py(ry(sx_lo)))
        << "\" x2=\"" << detail::fmt(px(sx_hi)) << "\" y2=\"" << detail::fmt(py(ry(sx_hi)))
        << "\" stroke=\"" << color << "\" stroke-dasharray=\"5,4\"/>\n";
    }
    const double ly = T + 16 + 34.0 * si;
    o << "<circle cx=\"" << W - R + 16 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << color
      << "\"/>\n";
    o << "<text x=\"" << W - R + 26 << "\" y=\"" << ly + 4 << "\">"
      << detail::escape_xml(s.label) << "</text>\n";
    std::string slopes;
    if (s.fitted_slope) slopes += "fit " + detail::fmt(*s.fitted_slope);
    if (s.claimed_slope) slopes += (slopes.empty() ? "" : ", ") + std::string("claimed ") +
                                   detail::fmt(*s.claimed_slope);
    if (!slopes.empty())
      o << "<text x=\"" << W - R + 26 << "\" y=\"" << ly + 18 << "\" font-size=\"10\">"
        << slopes << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace bnlab
