#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "covest/error.hpp"
#include "covest/harness/config.hpp"
#include "covest/harness/plot.hpp"
#include "covest/harness/runner.hpp"
#include "covest/harness/summary.hpp"

using namespace covest;
using namespace covest::harness;

namespace {

int list_estimators() {
  for (bool mimo : {false, true}) {
    std::cout << (mimo ? "\nmimo experiments (fig3_mimo, domain = mimo):\n" : "real-valued experiments:\n");
    for (const auto& e : estimator_registry()) {
      if (e.mimo != mimo) continue;
      std::string params;
      for (const auto& p : e.params) params += (params.empty() ? "" : ", ") + p;
      std::cout << "  " << e.id;
      if (!params.empty()) std::cout << " (" << params << ")";
      std::cout << "\n      " << e.description << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured covariance estimation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config and write its results CSV");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("-o,--output", output, "Override the config's output path");
  run_cmd->add_option("-j,--workers", workers, "Worker threads (default: COVEST_WORKERS or all cores)");

  std::string csv_path;
  std::string summary_out;
  auto* sum_cmd = app.add_subcommand("summarize", "Mean and standard error per grid point, estimator and metric");
  sum_cmd->add_option("csv", csv_path, "Results CSV")->required();
  sum_cmd->add_option("-o,--output", summary_out, "Write to a file instead of stdout");

  std::string plot_csv;
  std::string plot_spec;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG line chart and its data CSV");
  plot_cmd->add_option("csv", plot_csv, "Results or summary CSV")->required();
  plot_cmd->add_option("spec", plot_spec, "Plot spec file")->required();
  plot_cmd->add_option("-o,--output", plot_out, "Override the spec's output path");

  auto* list_cmd = app.add_subcommand("list-estimators", "List estimator ids and their parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (!output.empty()) cfg.output = output;
      const std::size_t rows = run_to_csv(cfg, cfg.output, workers);
      std::cerr << "wrote " << rows << " rows to " << cfg.output << "\n";
    } else if (*sum_cmd) {
      const auto table = summarize(read_csv(csv_path));
      if (summary_out.empty()) {
        write_summary(std::cout, table);
      } else {
        std::ofstream os(summary_out, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorCode::IOError, "cannot open '" + summary_out + "' for writing");
        write_summary(os, table);
      }
    } else if (*plot_cmd) {
      PlotSpec spec = load_plot_spec(plot_spec);
      if (!plot_out.empty()) spec.output = plot_out;
      emit_plot(load_table(plot_csv), spec);
      std::cerr << "wrote " << spec.output << " and " << data_path(spec.output) << "\n";
    } else if (*list_cmd) {
      return list_estimators();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
