#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "covest/harness/runner.hpp"

namespace covest::harness {

/// Aggregate over one (experiment, grid point, estimator, metric) group.
struct SummaryRow {
  std::string experiment;
  std::string grid_point;
  std::string estimator;
  std::string metric;
  double mean = 0.0;
  /// Sample standard deviation over sqrt(count); 0 for a single row.
  double std_error = 0.0;
  /// Successful rows.
  std::size_t count = 0;
  /// Failed rows, excluded from mean and std_error.
  std::size_t failures = 0;

  bool operator==(const SummaryRow&) const = default;
};

/// Groups in order of first appearance. Throws EmptyBatch on no rows.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

std::string summary_header();
/// Groups without a successful row leave mean and stderr empty.
std::string to_csv_line(const SummaryRow& row);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(std::istream& is);

/// Reads either a results CSV (summarizing it) or a summary CSV.
std::vector<SummaryRow> load_table(const std::string& path);

}  // namespace covest::harness
