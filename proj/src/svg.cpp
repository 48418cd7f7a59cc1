#include "suslab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace suslab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double lo, hi;
  bool log;
  double pixel_lo, pixel_hi;

  double operator()(double v) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

Scale make_scale(std::vector<double> values, bool log, double p0, double p1) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0.0)) continue;
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  }
  if (hi <= lo) hi = lo + 1.0;
  return {lo, hi, log, p0, p1};
}

}  // namespace

std::string line_chart(const PlotAxes& axes, const std::vector<PlotSeries>& series) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Scale sx = make_scale(xs, axes.log_x, kLeft, kWidth - kRight);
  const Scale sy = make_scale(ys, axes.log_y, kHeight - kBottom, kTop);
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(axes.title) << "</text>\n";
  o << "<path d=\"M" << kLeft << ' ' << kTop << " V" << kHeight - kBottom << " H" << kWidth - kRight
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Ticks at integer decades on log axes, five steps otherwise.
  auto ticks = [](const Scale& s) {
    std::vector<double> t;
    if (s.log) {
      for (double e = s.lo; e <= s.hi + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
    } else {
      for (int k = 0; k <= 5; ++k) t.push_back(s.lo + (s.hi - s.lo) * k / 5.0);
    }
    return t;
  };
  for (double t : ticks(sx)) {
    o << "<text x=\"" << num(sx(t)) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << label(t)
      << "</text>\n";
  }
  for (double t : ticks(sy)) {
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
  }
  o << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(axes.x_label)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2
    << ")\">" << escape(axes.y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string path;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double x = s.x[i], y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (axes.log_x && x <= 0.0) || (axes.log_y && y <= 0.0)) continue;
      path += (path.empty() ? "M" : " L") + num(sx(x)) + " " + num(sy(y));
    }
    if (!path.empty()) o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    o << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\""
      << color << "\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, double reference) {
  const double row = 24.0;
  const double height = kTop + row * static_cast<double>(values.size()) + 20.0;
  double top = reference > 0.0 ? reference : 0.0;
  for (double v : values) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  if (top <= 0.0) top = 1.0;
  const double x0 = 160.0, x1 = kWidth - kRight;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << num(height)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double y = kTop + row * static_cast<double>(k);
    const double v = std::isfinite(values[k]) ? std::max(0.0, values[k]) : top;
    o << "<text x=\"" << x0 - 6 << "\" y=\"" << num(y + 15) << "\" text-anchor=\"end\">"
      << escape(k < labels.size() ? labels[k] : "") << "</text>\n";
    o << "<rect x=\"" << x0 << "\" y=\"" << num(y + 4) << "\" width=\"" << num((x1 - x0) * v / top)
      << "\" height=\"" << row - 8 << "\" fill=\"" << kColors[0] << "\"/>\n";
    o << "<text x=\"" << num(x0 + (x1 - x0) * v / top + 4) << "\" y=\"" << num(y + 15) << "\">" << label(values[k])
      << "</text>\n";
  }
  if (reference > 0.0) {
    const double x = x0 + (x1 - x0) * reference / top;
    o << "<path d=\"M" << num(x) << ' ' << kTop << " V" << num(height - 20) << "\" stroke=\"" << kColors[1]
      << "\" stroke-dasharray=\"4 3\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string stack_svg(const std::vector<std::string>& documents) {
  // Each document is nested as an <svg> element with a y offset.
  std::ostringstream body;
  double y = 0.0;
  for (const auto& doc : documents) {
    double h = kHeight;
    const auto pos = doc.find("height=\"");
    if (pos != std::string::npos) h = std::stod(doc.substr(pos + 8));
    const auto open = doc.find("<svg ");
    body << "<svg y=\"" << num(y) << "\" " << doc.substr(open + 5);
    y += h;
  }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << num(y) << "\">\n"
    << body.str() << "</svg>\n";
  return o.str();
}

PlotSeries roof_graph(const RoofSpec& spec, std::size_t interval, std::size_t points) {
  PlotSeries s;
  s.name = "r on I_" + std::to_string(interval);
  const double len = spec.iet().length(interval);
  const double left = spec.iet().left(interval);
  const double eps = 1e-4 * len;
  for (std::size_t k = 0; k < points; ++k) {
    // Cosine spacing puts more samples near the singular ends.
    const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(points)));
    const double u = eps + t * (len - 2.0 * eps);
    s.x.push_back(left + u);
    s.y.push_back(spec.evaluate(interval, u, len - u).value);
  }
  return s;
}

}  // namespace suslab
