#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "covest/harness/summary.hpp"

namespace covest::harness {

/// Line chart description, read from `key = value` lines.
struct PlotSpec {
  /// Grid axis on the x axis (p, n, c, lambda, M, N) or `d` for epe metrics.
  std::string x = "n";
  /// Metric name; with x = d, the prefix of `<y>_d<k>` metrics.
  std::string y = "operator";
  /// Comma list of fields that name a series: `estimator` and/or grid axes.
  std::vector<std::string> series = {"estimator"};
  /// Optional field splitting the chart into side-by-side panels.
  std::string panel;
  bool log_x = false;
  bool log_y = false;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::string output = "plot.svg";
  /// Keep only rows whose field equals the value (numeric comparison when both parse).
  std::vector<std::pair<std::string, std::string>> filter;
};

PlotSpec parse_plot_spec(std::string_view text);
PlotSpec load_plot_spec(const std::string& path);

struct PlotPoint {
  double x = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

struct PlotSeries {
  std::string name;
  std::vector<PlotPoint> points;
};

struct PlotPanel {
  std::string name;
  std::vector<PlotSeries> series;
};

/// Groups summary rows into panels and series sorted by x. Throws InvalidParam
/// when nothing matches.
std::vector<PlotPanel> build_panels(const std::vector<SummaryRow>& table, const PlotSpec& spec);

std::string render_svg(const std::vector<PlotPanel>& panels, const PlotSpec& spec);
std::string render_data_csv(const std::vector<PlotPanel>& panels);

/// `out.svg` -> `out.data.csv`.
std::string data_path(const std::string& svg_path);

/// Writes the SVG to spec.output and the plotted data next to it.
void emit_plot(const std::vector<SummaryRow>& table, const PlotSpec& spec);

}  // namespace covest::harness
