#pragma once

// CSV emission/reading, results tables and standalone SVG plots.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rapida/ppo.hpp"
#include "rapida/rma.hpp"

namespace rapida::cli {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed CSV schemas.
const std::vector<std::string>& metrics_columns();
const std::vector<std::string>& episode_columns();
const std::vector<std::string>& results_columns();
const std::vector<std::string>& probe_columns();

std::string csv_header(const std::vector<std::string>& columns);
// Missing optional values are written as empty fields.
std::string metrics_csv_row(const rma::MetricsRow& row);
std::string episode_csv_row(const ppo::EpisodeRecord& episode, const std::string& variant,
                            const std::string& task);
std::string probe_csv_row(double stiffness, const std::vector<double>& embedding);
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ReportError naming the column when absent.
  std::size_t column(const std::string& name) const;
  // Column values as numbers; empty fields are skipped.
  std::vector<std::pair<double, double>> xy(const std::string& x, const std::string& y) const;
};
CsvTable parse_csv(const std::string& text, const std::string& source = "<csv>");
CsvTable read_csv(const std::string& path);

struct ResultRow {
  std::string task;
  std::string variant;
  std::string seed;  // "all" for the aggregate over seeds
  int successes = 0;
  int episodes = 0;
  double mean_steps = 0.0;

  double rate() const { return episodes > 0 ? static_cast<double>(successes) / episodes : 0.0; }
};

ResultRow result_row(const ppo::EvalSummary& eval, const std::string& task,
                     const std::string& variant, const std::string& seed);
// Sums successes and episodes (and averages steps) over rows of one cell.
ResultRow aggregate(const std::vector<ResultRow>& rows, const std::string& seed = "all");

struct ResultsTable {
  std::vector<ResultRow> rows;

  std::string text() const;
  std::string csv() const;
};
ResultsTable parse_results_csv(const CsvTable& table);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 400;
};

// Polylines with a legend (one entry per series).
std::string svg_line_plot(const std::vector<Series>& series, const PlotOptions& options);
// One <circle> per point.
std::string svg_scatter_plot(const Series& series, const PlotOptions& options);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace rapida::cli
