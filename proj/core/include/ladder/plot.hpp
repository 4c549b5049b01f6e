#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ladder {

enum class PlotKind { loss_vs_tokens, acc_vs_loss, error_vs_flops, curve_overlay };
enum class MarkerShape { square, plus, pentagon, star };

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  MarkerShape marker = MarkerShape::square;
  bool fit_line = false; // rendered as a polyline, no markers
};

/// Data-to-pixel mapping, exposed so tests can recompute coordinates.
struct PlotTransform {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  bool log_x = false;
  double left = 64.0, right = 744.0; // plot area inside the 800x480 canvas
  double top = 40.0, bottom = 424.0;

  double map_x(double x) const;
  double map_y(double y) const;
};

/// Token and FLOPs axes are log-scaled; ranges padded by 5% in
/// transformed space.
PlotTransform plot_transform(PlotKind kind, std::span<const PlotSeries> series);

/// Self-contained deterministic SVG; numbers printed with %.6g.
std::string render_svg(PlotKind kind, std::span<const PlotSeries> series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label);

void emit_plot(const std::string& path, PlotKind kind,
               std::span<const PlotSeries> series, const std::string& title,
               const std::string& x_label, const std::string& y_label);

} // namespace ladder
