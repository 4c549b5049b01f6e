#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "ladder/plot.hpp"

using namespace ladder;

namespace {

std::vector<PlotSeries> sample_series() {
  PlotSeries s;
  s.name = "data";
  s.marker = MarkerShape::star;
  s.points = {{1e9, 1.5}, {1e10, 1.2}, {1e11, 1.0}};
  return {s};
}

} // namespace

TEST_CASE("render_svg produces a self-contained SVG document") {
  auto svg = render_svg(PlotKind::loss_vs_tokens, sample_series(), "t", "x", "y");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  // every opened polygon/rect/text closes
  CHECK(svg.find("<polygon") != std::string::npos);
}

TEST_CASE("rendering is byte-identical across calls") {
  auto a = render_svg(PlotKind::curve_overlay, sample_series(), "t", "x", "y");
  auto b = render_svg(PlotKind::curve_overlay, sample_series(), "t", "x", "y");
  CHECK(a == b);
}

TEST_CASE("token and flops axes are log-scaled, accuracy axes are not") {
  auto series = sample_series();
  CHECK(plot_transform(PlotKind::loss_vs_tokens, series).log_x);
  CHECK(plot_transform(PlotKind::error_vs_flops, series).log_x);
  CHECK(plot_transform(PlotKind::curve_overlay, series).log_x);
  CHECK_FALSE(plot_transform(PlotKind::acc_vs_loss, series).log_x);
}

TEST_CASE("extreme data points map inside the plot area") {
  auto series = sample_series();
  auto t = plot_transform(PlotKind::loss_vs_tokens, series);
  for (const auto& [x, y] : series[0].points) {
    double px = t.map_x(x), py = t.map_y(y);
    CHECK(px >= t.left);
    CHECK(px <= t.right);
    CHECK(py >= t.top);
    CHECK(py <= t.bottom);
  }
  // midpoint of a log-x transform is the geometric mean of the range
  double geo = std::sqrt(t.x_min * t.x_max);
  CHECK(t.map_x(geo) == doctest::Approx((t.left + t.right) / 2.0).epsilon(1e-9));
}

TEST_CASE("log axes reject nonpositive x") {
  PlotSeries s;
  s.points = {{0.0, 1.0}, {1.0, 2.0}};
  std::vector<PlotSeries> series{s};
  CHECK_THROWS_AS(plot_transform(PlotKind::loss_vs_tokens, series),
                  std::invalid_argument);
  CHECK_THROWS_AS(plot_transform(PlotKind::loss_vs_tokens, std::vector<PlotSeries>{}),
                  std::invalid_argument);
}

TEST_CASE("fit lines render as polylines without markers") {
  PlotSeries line;
  line.name = "fit";
  line.fit_line = true;
  line.points = {{1e9, 1.5}, {1e10, 1.2}};
  std::vector<PlotSeries> series{line};
  auto svg = render_svg(PlotKind::loss_vs_tokens, series, "t", "x", "y");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<polygon") == std::string::npos);
}
