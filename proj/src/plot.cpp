#include "dsgda/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dsgda {

namespace {

constexpr double kWidth = 480, kHeight = 320;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

struct Scale {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                         : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Scale fit(const std::vector<double>& vals) {
  Scale s;
  double lo = INFINITY, hi = -INFINITY;
  for (double v : vals) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) return s;
  s.log = lo > 0 && hi / lo >= 10;
  if (hi == lo) {
    const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
    s.log = false;
  }
  s.lo = lo;
  s.hi = hi;
  return s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string render(const std::string& axis, const std::string& measure,
                   const std::vector<const OutputRow*>& rows) {
  std::vector<double> xs;
  bool numeric = true;
  for (const auto* r : rows) {
    char* end = nullptr;
    const double v = std::strtod(r->value.c_str(), &end);
    if (r->value.empty() || *end != '\0') numeric = false;
    xs.push_back(v);
  }
  if (!numeric) {
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  }
  Scale sx = fit(xs);
  if (!numeric) {
    sx.lo = -0.5;
    sx.hi = xs.size() - 0.5;
    sx.log = false;
  }

  std::vector<double> ys;
  for (const auto* r : rows) {
    ys.push_back(r->mean + r->std);
    ys.push_back(r->mean - r->std);
    if (std::isfinite(r->bound)) ys.push_back(r->bound);
  }
  Scale sy = fit(ys);
  if (sy.log) {
    // Lower band edges at or below zero would leave the log axis.
    double lo = INFINITY;
    for (double v : ys)
      if (v > 0) lo = std::min(lo, v);
    sy.lo = lo;
  }

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  auto px = [&](double v) { return sx.map(v, x0, x1); };
  auto py = [&](double v) {
    if (sy.log) v = std::max(v, sy.lo);
    return sy.map(v, y0, y1);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << escape(measure) << "</text>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(axis) << (sx.log ? " (log)" : "") << "</text>\n";
  if (sy.log) {
    os << "<text x=\"12\" y=\"" << (y0 + y1) / 2 << "\" transform=\"rotate(-90 12 " << (y0 + y1) / 2
       << ")\" text-anchor=\"middle\">log scale</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double v = sy.log ? std::pow(10.0, std::log10(sy.lo) + t * (std::log10(sy.hi) - std::log10(sy.lo)))
                            : sy.lo + t * (sy.hi - sy.lo);
    const double y = y0 + t * (y1 - y0);
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(v)
       << "</text>\n";
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "<text x=\"" << px(xs[i]) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
       << escape(rows[i]->value) << "</text>\n";
  }

  std::ostringstream band, line, bound;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    band << (i ? " " : "") << px(xs[i]) << "," << py(rows[i]->mean + rows[i]->std);
  }
  for (std::size_t i = rows.size(); i-- > 0;) {
    band << " " << px(xs[i]) << "," << py(rows[i]->mean - rows[i]->std);
  }
  os << "<polygon points=\"" << band.str() << "\" fill=\"steelblue\" fill-opacity=\"0.25\"/>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    line << (i ? " " : "") << px(xs[i]) << "," << py(rows[i]->mean);
  }
  os << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(rows[i]->mean)
       << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  bool any_bound = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(rows[i]->bound)) continue;
    bound << (any_bound ? " " : "") << px(xs[i]) << "," << py(rows[i]->bound);
    any_bound = true;
  }
  if (any_bound) {
    os << "<polyline points=\"" << bound.str()
       << "\" fill=\"none\" stroke=\"firebrick\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << x1 << "\" y=\"" << y1 + 10 << "\" text-anchor=\"end\" fill=\"firebrick\">bound</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::map<std::string, std::string> svg_plots(const std::vector<OutputRow>& rows) {
  std::map<std::string, std::vector<const OutputRow*>> by_measure;
  std::map<std::string, std::string> axis_of;
  for (const auto& r : rows) {
    if (!r.failure.empty() || r.measure == "cell") continue;
    by_measure[r.measure].push_back(&r);
    axis_of[r.measure] = r.axis;
  }
  std::map<std::string, std::string> out;
  for (const auto& [measure, list] : by_measure) {
    out[measure] = render(axis_of[measure], measure, list);
  }
  return out;
}

}  // namespace dsgda
