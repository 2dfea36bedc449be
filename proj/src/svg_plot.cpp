#include "pidmd/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace pidmd {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

bool plottable(double v) { return std::isfinite(v) && v > 0.0; }

struct LogAxis {
  int lo = -1;
  int hi = 0;

  static LogAxis around(const std::vector<double>& values) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (double v : values) {
      if (!plottable(v)) continue;
      mn = std::min(mn, std::log10(v));
      mx = std::max(mx, std::log10(v));
    }
    if (!std::isfinite(mn)) return {};
    LogAxis a{static_cast<int>(std::floor(mn)), static_cast<int>(std::ceil(mx))};
    if (a.hi == a.lo) ++a.hi;
    return a;
  }

  double y(double v) const {
    const double t = (std::log10(v) - lo) / static_cast<double>(hi - lo);
    return kHeight - kBottom - t * (kHeight - kTop - kBottom);
  }
};

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& out, const LogAxis& axis, const std::string& label) {
  const double x0 = kLeft;
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  for (int d = axis.lo; d <= axis.hi; ++d) {
    const double y = axis.y(std::pow(10.0, d));
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight)
        << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  out << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num((kTop + kHeight - kBottom) / 2)
      << ")\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string box_plot_svg(const std::vector<MethodSummary>& rows, const std::string& title) {
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), {r.min, r.q1, r.median, r.q3, r.max});
  const LogAxis axis = LogAxis::around(values);

  std::ostringstream out;
  header(out, title);
  y_axis(out, axis, "time-averaged residual error");
  const double plot_w = kWidth - kLeft - kRight;
  const double slot = rows.empty() ? plot_w : plot_w / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    const char* color = kColors[i % std::size(kColors)];
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 18)
        << "\" text-anchor=\"middle\">" << escape(r.method) << "</text>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 34)
        << "\" text-anchor=\"middle\" font-size=\"10\">diverged " << r.diverged << "/" << r.count
        << "</text>\n";
    if (!(plottable(r.min) && plottable(r.q1) && plottable(r.median) && plottable(r.q3) &&
          plottable(r.max))) {
      continue;
    }
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(axis.y(r.min)) << "\" x2=\"" << num(cx)
        << "\" y2=\"" << num(axis.y(r.max)) << "\" stroke=\"" << color << "\"/>\n";
    out << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(axis.y(r.q3)) << "\" width=\""
        << num(2 * half) << "\" height=\"" << num(axis.y(r.q1) - axis.y(r.q3)) << "\" fill=\"" << color
        << "\" fill-opacity=\"0.3\" stroke=\"" << color << "\"/>\n";
    for (double v : {r.min, r.median, r.max}) {
      out << "<line x1=\"" << num(cx - half) << "\" y1=\"" << num(axis.y(v)) << "\" x2=\""
          << num(cx + half) << "\" y2=\"" << num(axis.y(v)) << "\" stroke=\"" << color
          << "\" stroke-width=\"" << (v == r.median ? 2 : 1) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string line_plot_svg(const std::vector<LineSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
  std::vector<double> ys;
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!plottable(s.y[i])) continue;
      ys.push_back(s.y[i]);
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const LogAxis axis = LogAxis::around(ys);
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight); };

  std::ostringstream out;
  header(out, title);
  y_axis(out, axis, y_label);
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
      << num(kWidth - kRight) << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  for (double x : {xmin, xmax}) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!plottable(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += num(px(s.x[i])) + "," + num(axis.y(s.y[i]));
      out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(axis.y(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(kTop + 14 * (k + 1))
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pidmd
