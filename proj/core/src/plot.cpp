#include "ladder/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ladder {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

void draw_marker(std::ostringstream& out, MarkerShape shape, double cx, double cy,
                 const char* color) {
  constexpr double r = 4.0;
  switch (shape) {
    case MarkerShape::square:
      out << "<rect x=\"" << fmt(cx - r) << "\" y=\"" << fmt(cy - r) << "\" width=\""
          << fmt(2 * r) << "\" height=\"" << fmt(2 * r) << "\" fill=\"" << color
          << "\"/>\n";
      return;
    case MarkerShape::plus:
      out << "<path d=\"M" << fmt(cx - r) << " " << fmt(cy) << "H" << fmt(cx + r)
          << "M" << fmt(cx) << " " << fmt(cy - r) << "V" << fmt(cy + r)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\" fill=\"none\"/>\n";
      return;
    case MarkerShape::pentagon:
    case MarkerShape::star: {
      int spikes = shape == MarkerShape::pentagon ? 5 : 5;
      double inner = shape == MarkerShape::pentagon ? r : 0.45 * r;
      out << "<polygon points=\"";
      int n = shape == MarkerShape::pentagon ? spikes : 2 * spikes;
      for (int i = 0; i < n; ++i) {
        double rad = (shape == MarkerShape::pentagon || i % 2 == 0) ? 1.25 * r : inner;
        double angle = -std::numbers::pi / 2.0 +
                       2.0 * std::numbers::pi * static_cast<double>(i) /
                           static_cast<double>(n);
        if (i) out << ' ';
        out << fmt(cx + rad * std::cos(angle)) << ',' << fmt(cy + rad * std::sin(angle));
      }
      out << "\" fill=\"" << color << "\"/>\n";
      return;
    }
  }
}

} // namespace

double PlotTransform::map_x(double x) const {
  double lo = log_x ? std::log10(x_min) : x_min;
  double hi = log_x ? std::log10(x_max) : x_max;
  double v = log_x ? std::log10(x) : x;
  double t = hi == lo ? 0.5 : (v - lo) / (hi - lo);
  return left + t * (right - left);
}

double PlotTransform::map_y(double y) const {
  double t = y_max == y_min ? 0.5 : (y - y_min) / (y_max - y_min);
  return bottom - t * (bottom - top);
}

PlotTransform plot_transform(PlotKind kind, std::span<const PlotSeries> series) {
  bool any = false;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x_min = x_max = x;
        y_min = y_max = y;
        any = true;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (!any) throw std::invalid_argument("plot_transform: no points");

  PlotTransform t;
  t.log_x = kind == PlotKind::loss_vs_tokens || kind == PlotKind::error_vs_flops ||
            kind == PlotKind::curve_overlay;
  if (t.log_x && x_min <= 0.0)
    throw std::invalid_argument("plot_transform: log axis needs positive x");

  if (t.log_x) {
    double lo = std::log10(x_min), hi = std::log10(x_max);
    double pad = (hi - lo) * 0.05 + 1e-12;
    t.x_min = std::pow(10.0, lo - pad);
    t.x_max = std::pow(10.0, hi + pad);
  } else {
    double pad = (x_max - x_min) * 0.05 + 1e-12;
    t.x_min = x_min - pad;
    t.x_max = x_max + pad;
  }
  double pad = (y_max - y_min) * 0.05 + 1e-12;
  t.y_min = y_min - pad;
  t.y_max = y_max + pad;
  return t;
}

std::string render_svg(PlotKind kind, std::span<const PlotSeries> series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  PlotTransform t = plot_transform(kind, series);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 480\" "
         "font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"480\" fill=\"white\"/>\n";
  out << "<rect x=\"" << fmt(t.left) << "\" y=\"" << fmt(t.top) << "\" width=\""
      << fmt(t.right - t.left) << "\" height=\"" << fmt(t.bottom - t.top)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
  out << "<text x=\"400\" y=\"466\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"232\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
         "232)\">"
      << y_label << "</text>\n";

  // axis ticks: 5 per axis, decades when log-scaled
  for (int i = 0; i <= 4; ++i) {
    double fy = t.y_min + (t.y_max - t.y_min) * i / 4.0;
    double py = t.map_y(fy);
    out << "<line x1=\"" << fmt(t.left - 4) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(t.left) << "\" y2=\"" << fmt(py) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(t.left - 8) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";

    double fx;
    if (t.log_x) {
      double lo = std::log10(t.x_min), hi = std::log10(t.x_max);
      fx = std::pow(10.0, lo + (hi - lo) * i / 4.0);
    } else {
      fx = t.x_min + (t.x_max - t.x_min) * i / 4.0;
    }
    double px = t.map_x(fx);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(t.bottom) << "\" x2=\""
        << fmt(px) << "\" y2=\"" << fmt(t.bottom + 4) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(t.bottom + 18)
        << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (s.fit_line) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out << ' ';
        out << fmt(t.map_x(s.points[i].first)) << ','
            << fmt(t.map_y(s.points[i].second));
      }
      out << "\"/>\n";
    } else {
      for (const auto& [x, y] : s.points)
        draw_marker(out, s.marker, t.map_x(x), t.map_y(y), color);
    }
    double ly = t.top + 16.0 + 16.0 * static_cast<double>(si);
    out << "<rect x=\"" << fmt(t.right - 150) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << fmt(t.right - 136) << "\" y=\"" << fmt(ly) << "\">"
        << s.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_plot(const std::string& path, PlotKind kind,
               std::span<const PlotSeries> series, const std::string& title,
               const std::string& x_label, const std::string& y_label) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << render_svg(kind, series, title, x_label, y_label);
}

} // namespace ladder
