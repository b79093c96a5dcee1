#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rnkm/error.hpp"
#include "rnkm/harness.hpp"

namespace rnkm::harness {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<double>& xs,
                           const std::vector<Series>& series, bool log_x) {
  if (xs.empty()) throw_invalid("chart needs at least one x value");
  for (const auto& s : series)
    if (s.ys.size() != xs.size()) throw_invalid("series '" + s.name + "' length differs from x");
  if (log_x)
    for (double x : xs)
      if (!(x > 0.0)) throw_invalid("log axis needs positive x values");

  auto fx = [&](double x) { return log_x ? std::log10(x) : x; };
  double x_lo = fx(*std::min_element(xs.begin(), xs.end()));
  double x_hi = fx(*std::max_element(xs.begin(), xs.end()));
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : series)
    for (double y : s.ys)
      if (std::isfinite(y)) y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
  if (!std::isfinite(y_lo)) y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (fx(x) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fxv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double xv = log_x ? std::pow(10.0, fxv) : fxv;
    const double sx = kLeft + pw * i / 4.0;
    out += "<line x1=\"" + num(sx) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx) + "\" y2=\"" +
           num(kTop + ph + 5) + "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(sx) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" + num(xv) +
           "</text>\n";
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    const double sy = py(yv);
    out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(sy) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(sy) +
           "\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy + 4) + "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
         escape(x_label) + (log_x ? " (log)" : "") + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    // Non-finite values break the line into separate segments.
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
               "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double y = series[s].ys[i];
      if (!std::isfinite(y)) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(px(xs[i])) + "," + num(py(y));
    }
    flush();
    if (series.size() > 1)
      out += "<text x=\"" + num(kLeft + 8) + "\" y=\"" + num(kTop + 14 + 14.0 * s) + "\" fill=\"" + color + "\">" +
             escape(series[s].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace rnkm::harness
