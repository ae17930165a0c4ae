// mkvopt: run experiment grids, print comparison tables, export convergence
// curves.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness/config.hpp"
#include "harness/experiment.hpp"
#include "harness/report.hpp"
#include "harness/trace_io.hpp"
#include "mkvnoise/objectives.hpp"
#include "mkvnoise/version.hpp"

namespace fs = std::filesystem;
using namespace mkvnoise::harness;

namespace {

int cmd_run(const std::string& config_path, unsigned jobs, std::optional<std::uint64_t> seed,
            std::optional<std::string> output) {
  ExperimentConfig cfg = load_experiment(config_path);
  if (seed) cfg.base_seed = *seed;
  if (output) cfg.output = *output;
  std::cerr << "running " << cfg.methods.size() << " method(s) x " << cfg.benchmarks.size()
            << " benchmark(s) x " << cfg.n_runs << " run(s) into " << cfg.output.string() << "\n";
  const ExperimentSummary summary = run_experiment(cfg, jobs, &std::cerr);
  if (summary.diverged_runs > 0)
    std::cerr << summary.diverged_runs << " of " << summary.total_runs << " runs diverged\n";
  if (summary.exit_status == kExitDiverged)
    std::cerr << "error: diverged fraction exceeds max_diverged_fraction="
              << cfg.max_diverged_fraction << "\n";
  return summary.exit_status;
}

int cmd_report(const std::string& dir, std::optional<std::string> csv) {
  const LoadedResults res = load_results(dir);
  const auto tables = build_tables(res);
  std::cout << format_tables(res, tables);
  const fs::path csv_path = csv ? fs::path(*csv) : fs::path(dir) / "report.csv";
  write_file_atomic(csv_path, tables_csv(res, tables));
  std::cerr << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

int cmd_plot_data(const std::string& dir, const std::string& benchmark,
                  const std::vector<std::string>& methods, std::optional<std::string> output) {
  const LoadedResults res = load_results(dir);
  const std::string csv = plot_data_csv(res, benchmark, methods);
  if (output) write_file_atomic(*output, csv);
  else std::cout << csv;
  return kExitOk;
}

int cmd_list_objectives() {
  std::printf("%-16s %-18s %-8s %-22s %s\n", "key", "name", "min dim", "domain", "minimum");
  for (const auto& e : mkvnoise::objective_registry()) {
    std::printf("%-16s %-18s %-8lld %-22s %s\n", std::string(e.name).c_str(),
                std::string(e.display_name).c_str(), static_cast<long long>(e.min_dim),
                std::string(e.domain_note).c_str(), std::string(e.minimum_note).c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interacting-particle optimizers with common-noise perturbations"};
  app.set_version_flag("--version", std::string(mkvnoise::kVersion));
  app.require_subcommand(1);

  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute an experiment grid");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs,-j", jobs, "Parallel runs (0 = all cores)")->capture_default_str();
  run->add_option("--seed", seed, "Override base_seed");
  run->add_option("--output,-o", output, "Override the output directory");

  std::string dir;
  std::optional<std::string> csv;
  auto* report = app.add_subcommand("report", "Print comparison tables for a results directory");
  report->add_option("dir", dir, "Results directory")->required();
  report->add_option("--csv", csv, "CSV output path (default <dir>/report.csv)");

  std::string benchmark;
  std::vector<std::string> methods;
  std::optional<std::string> plot_out;
  auto* plot = app.add_subcommand("plot-data", "Mean and std convergence curves as CSV");
  plot->add_option("dir", dir, "Results directory")->required();
  plot->add_option("--benchmark,-b", benchmark, "Benchmark slug or name")->required();
  plot->add_option("--methods,-m", methods, "Method slugs or names")->required()->delimiter(',');
  plot->add_option("--output,-o", plot_out, "Write CSV here instead of stdout");

  auto* list = app.add_subcommand("list-objectives", "Show the benchmark registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, jobs, seed, output);
    if (*report) return cmd_report(dir, csv);
    if (*plot) return cmd_plot_data(dir, benchmark, methods, plot_out);
    if (*list) return cmd_list_objectives();
  } catch (const HarnessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
