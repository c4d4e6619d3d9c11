#include "anchorrefine/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace anchorrefine::cli {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string Escape(const std::string& s) {
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

std::string Header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) +
         "\" height=\"" + Num(kHeight) + "\" font-family=\"sans-serif\" " +
         "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" " +
         "fill=\"white\"/>\n<text x=\"" + Num(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         Escape(title) + "</text>\n";
}

std::string Axes(const std::string& x_label, const std::string& y_label,
                 double y_lo, double y_hi, bool log_y) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  std::string s = "<line x1=\"" + Num(x0) + "\" y1=\"" + Num(y0) +
                  "\" x2=\"" + Num(x1) + "\" y2=\"" + Num(y0) +
                  "\" stroke=\"black\"/>\n<line x1=\"" + Num(x0) + "\" y1=\"" +
                  Num(y0) + "\" x2=\"" + Num(x0) + "\" y2=\"" + Num(y1) +
                  "\" stroke=\"black\"/>\n";
  auto label = [](double v, bool log) { return Num(log ? std::pow(10, v) : v); };
  s += "<text x=\"" + Num(x0 - 5) + "\" y=\"" + Num(y0) +
       "\" text-anchor=\"end\">" + label(y_lo, log_y) + "</text>\n";
  s += "<text x=\"" + Num(x0 - 5) + "\" y=\"" + Num(y1 + 10) +
       "\" text-anchor=\"end\">" + label(y_hi, log_y) + "</text>\n";
  if (!x_label.empty()) {
    s += "<text x=\"" + Num((x0 + x1) / 2) + "\" y=\"" + Num(kHeight - 12) +
         "\" text-anchor=\"middle\">" + Escape(x_label) + "</text>\n";
  }
  if (!y_label.empty()) {
    s += "<text transform=\"translate(16," + Num((y0 + y1) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + Escape(y_label) +
         "</text>\n";
  }
  return s;
}

}  // namespace

std::string RenderSvg(const LineChart& chart) {
  auto ty = [&](double y) { return chart.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!chart.log_y || y > 0);
  };
  double xl = std::numeric_limits<double>::infinity(), xh = -xl;
  double yl = xl, yh = -xl;
  for (const Series& s : chart.series) {
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xl = std::min(xl, s.x[i]);
      xh = std::max(xh, s.x[i]);
      yl = std::min(yl, ty(s.y[i]));
      yh = std::max(yh, ty(s.y[i]));
    }
  }
  if (chart.has_reference && usable(0.0, chart.reference)) {
    yl = std::min(yl, ty(chart.reference));
    yh = std::max(yh, ty(chart.reference));
  }
  if (!(xl <= xh)) xl = 0, xh = 1;
  if (!(yl <= yh)) yl = 0, yh = 1;
  if (xh == xl) xh = xl + 1;
  if (yh == yl) yh = yl + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xl) / (xh - xl) * pw; };
  auto py = [&](double y) {
    return kHeight - kBottom - (ty(y) - yl) / (yh - yl) * ph;
  };

  std::string out = Header(chart.title);
  out += Axes(chart.x_label, chart.y_label, yl, yh, chart.log_y);
  out += "<text x=\"" + Num(kLeft) + "\" y=\"" + Num(kHeight - kBottom + 15) +
         "\" text-anchor=\"middle\">" + Num(xl) + "</text>\n";
  out += "<text x=\"" + Num(kWidth - kRight) + "\" y=\"" +
         Num(kHeight - kBottom + 15) + "\" text-anchor=\"middle\">" + Num(xh) +
         "</text>\n";
  if (chart.has_reference && usable(0.0, chart.reference)) {
    const double y = py(chart.reference);
    out += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(y) + "\" x2=\"" +
           Num(kWidth - kRight) + "\" y2=\"" + Num(y) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out += "<text x=\"" + Num(kWidth - kRight - 4) + "\" y=\"" + Num(y - 4) +
           "\" text-anchor=\"end\" fill=\"gray\">" +
           Escape(chart.reference_label) + "</text>\n";
  }
  for (size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      pts += Num(px(s.x[i])) + "," + Num(py(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + Num(kLeft + 10) + "\" y=\"" +
           Num(kTop + 14 + 16 * static_cast<double>(k)) + "\" fill=\"" +
           color + "\">" + Escape(s.name) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::string RenderSvg(const BarChart& chart) {
  double hi = 0.0;
  for (double v : chart.values) {
    if (std::isfinite(v)) hi = std::max(hi, v);
  }
  if (hi == 0.0) hi = 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const size_t n = std::max<size_t>(chart.values.size(), 1);
  const double slot = pw / static_cast<double>(n);

  std::string out = Header(chart.title);
  out += Axes("", chart.y_label, 0.0, hi, false);
  for (size_t i = 0; i < chart.values.size(); ++i) {
    const double v = std::isfinite(chart.values[i]) ? chart.values[i] : 0.0;
    const double h = v / hi * ph;
    const double x = kLeft + slot * (static_cast<double>(i) + 0.15);
    out += "<rect x=\"" + Num(x) + "\" y=\"" + Num(kHeight - kBottom - h) +
           "\" width=\"" + Num(slot * 0.7) + "\" height=\"" + Num(h) +
           "\" fill=\"" + kPalette[i % std::size(kPalette)] + "\"/>\n";
    out += "<text x=\"" + Num(x + slot * 0.35) + "\" y=\"" +
           Num(kHeight - kBottom - h - 4) + "\" text-anchor=\"middle\">" +
           Num(chart.values[i]) + "</text>\n";
    if (i < chart.labels.size()) {
      out += "<text x=\"" + Num(x + slot * 0.35) + "\" y=\"" +
             Num(kHeight - kBottom + 15) + "\" text-anchor=\"middle\">" +
             Escape(chart.labels[i]) + "</text>\n";
    }
  }
  return out + "</svg>\n";
}

}  // namespace anchorrefine::cli
