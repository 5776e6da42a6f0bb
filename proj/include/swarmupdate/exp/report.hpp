#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "swarmupdate/exp/csv.hpp"

namespace swarmupdate::exp {

/// One qualitative comparison between strategies over cell means.
struct OrderingCheck {
  std::string name;
  /// False when the data lacks the cells the comparison needs.
  bool populated = false;
  bool pass = false;
  std::string detail;
};

/// Evaluates the ordering and ratio checks that the cell means support.
std::vector<OrderingCheck> evaluate_orderings(const std::vector<CellMean>& means);

std::string summary_table(const std::vector<CellMean>& means);
std::string orderings_table(const std::vector<OrderingCheck>& checks);

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct ChartPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
};

/// Static SVG with the panels laid out side by side.
std::string render_svg(const std::string& title, const std::vector<ChartPanel>& panels);

struct ReportFiles {
  std::filesystem::path summary;
  std::filesystem::path orderings;
  std::filesystem::path means_csv;
  std::vector<std::filesystem::path> charts;
  std::vector<OrderingCheck> checks;
};

/// Writes summary.txt, orderings.txt, means.csv and three charts into `out_dir`.
ReportFiles write_report(const std::vector<SweepRow>& rows, const std::filesystem::path& out_dir);

}  // namespace swarmupdate::exp
