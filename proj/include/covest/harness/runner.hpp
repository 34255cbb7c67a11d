#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "covest/harness/config.hpp"

namespace covest::harness {

struct ResultRow {
  std::string experiment;
  std::size_t trial = 0;
  std::string grid_point;
  std::string estimator;
  std::string metric;
  /// NaN for failed invocations.
  double value = 0.0;
  /// Seconds spent in the estimator; 0 when wall_time is off.
  double wall_time = 0.0;
  /// `key=value` pairs joined by `;`. Failed rows carry `status=failed`.
  std::string metadata;

  bool failed() const;
  bool operator==(const ResultRow&) const = default;
};

struct EstimatorInfo {
  std::string id;
  bool mimo = false;
  std::vector<std::string> params;
  std::string description;
};

const std::vector<EstimatorInfo>& estimator_registry();
const EstimatorInfo* find_estimator(const std::string& id, bool mimo);

struct GridPoint {
  std::size_t dim = 0;
  std::size_t samples = 0;
  std::optional<double> corr;
  std::optional<double> lambda;

  /// e.g. `p=20;n=50;c=0.5`, or `M=32;N=16` for mimo.
  std::string label(bool mimo) const;
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

/// Rows of one grid point and trial; never throws for estimator failures.
std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, const GridPoint& gp, std::size_t trial);

/// Worker count from COVEST_WORKERS, else the hardware concurrency.
std::size_t workers_from_env();

/// Runs every grid point x trial. Rows reach `sink` in a fixed order
/// (grid point, trial, estimator, metric) whatever the worker count.
void run(const ExperimentConfig& cfg, const std::function<void(const ResultRow&)>& sink, std::size_t workers = 0);
std::vector<ResultRow> run(const ExperimentConfig& cfg, std::size_t workers = 0);

/// Writes the header, then each row as soon as it is in order, flushing
/// per trial so an interrupted run leaves a valid prefix. Returns the row count.
std::size_t run_to_csv(const ExperimentConfig& cfg, const std::string& path, std::size_t workers = 0);

// ------------------------------------------------------------------- csv

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string to_csv_line(const ResultRow& row);
/// Shortest text that reads back to the same double; `nan` for NaN.
std::string format_value(double x);
ResultRow parse_csv_line(const std::string& line);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_csv(const std::string& path);

/// Splits `a=1;b=x` into pairs.
std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& s);

}  // namespace covest::harness
