#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "covest/mimo.hpp"

namespace covest::harness {

enum class Experiment { Fig3Mimo, Fig4Correlation, Fig5Dimension, Fig6LambdaSweep, Custom };

std::optional<Experiment> experiment_from_string(std::string_view s);
std::string to_string(Experiment e);

/// An estimator id with its parameters, e.g. `thresholded(mprime=2)`.
struct EstimatorSpec {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;

  /// Canonical text: id, then `(k=v;k=v)` when parameters are present.
  std::string label() const;
  std::optional<std::string> get(std::string_view key) const;
  /// Numeric parameter or `fallback`; throws ConfigError when not a number.
  double number(std::string_view key, double fallback) const;
};

/// Parses `id` or `id(k=v, k=v)`; parameters may be separated by `,` or `;`.
EstimatorSpec parse_estimator(std::string_view text);

/// Ground truth for the real-valued experiments.
struct TruthConfig {
  /// const_corr | banded_toeplitz | sparse_random | low_rank | identity
  std::string model = "const_corr";
  std::vector<double> toeplitz_col = {1.0, 0.5, 0.25};
  std::size_t toeplitz_width = 3;
  double sparse_q = 0.0;
  double sparse_s = 3.0;
  double sparse_bound = 1.0;
  std::size_t rank = 2;
  double ridge = 0.1;
  /// none | linear. `linear` conjugates the truth with diag(1, 2, ..., p).
  std::string diag_scale = "none";

  /// Text stored in row metadata.
  std::string describe(std::optional<double> corr) const;
};

struct MimoSettings {
  double spacing = 0.5;
  double snr_db = 10.0;
  std::size_t asfs = 20;
  std::size_t realizations = 50;
  AsfRecipe recipe;
  /// Empty means 1, 2, 4, ..., M/2.
  std::vector<std::size_t> epe_d;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Custom;
  /// True for the channel-covariance experiments (fig3 or `domain = mimo`).
  bool mimo = false;
  std::uint64_t seed = 1;
  /// Trials per grid point; for mimo experiments asfs * realizations.
  std::size_t trials = 100;
  /// p, or M for mimo.
  std::vector<std::size_t> dims = {20};
  /// n, or N for mimo.
  std::vector<std::size_t> samples = {100};
  /// Off-diagonal level of const_corr truths; one grid axis.
  std::vector<double> corr = {0.5};
  /// Dither levels as multiples of ||Sigma||_inf; one grid axis when nonempty.
  std::vector<double> lambda;
  TruthConfig truth;
  MimoSettings mimo_settings;
  std::vector<EstimatorSpec> estimators;
  std::vector<std::string> metrics = {"operator"};
  std::string output = "results.csv";
  bool wall_time = true;
  /// Resolved defaults and scale-down notes copied into every row's metadata.
  std::vector<std::pair<std::string, std::string>> notes;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Preset for one of the figure experiments; `custom` gives the bare defaults.
ExperimentConfig default_config(Experiment e);

/// Reads `key = value` lines; `#` starts a comment. The `experiment` key
/// selects a preset that the remaining keys override. Unknown keys, bad
/// values and failed validation throw ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

const std::vector<std::string>& config_keys();

}  // namespace covest::harness
