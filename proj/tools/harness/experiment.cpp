#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

#include "mkvnoise/version.hpp"
#include "trace_io.hpp"

namespace mkvnoise::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void execute_one(const ExperimentConfig& config, RunStatus& status) {
  const MethodSpec& method = config.methods[status.method];
  const BenchmarkSpec& bench = config.benchmarks[status.benchmark];
  const RunConfig rc = make_run_config(config, method, bench, status.run);
  const fs::path path = trace_path(config.output, method.slug, bench.slug, status.run);
  try {
    write_trace(path, run(rc));
  } catch (const RunDiverged& e) {
    status.diverged_iteration = e.iteration();
    write_trace(path, e.partial_trace());
  }
}

}  // namespace

json make_manifest(const ExperimentConfig& config, const ExperimentSummary& summary) {
  json m;
  m["software"] = {{"name", "mkvnoise"}, {"version", kVersion}};
  m["config"] = to_json(config);
  m["benchmarks"] = json::array();
  for (const auto& b : config.benchmarks) {
    m["benchmarks"].push_back({{"name", b.name},
                               {"display_name", b.display_name},
                               {"slug", b.slug},
                               {"dim", b.dim},
                               {"normalize_by_dim", b.normalize_by_dim},
                               {"known_min", b.known_min_value}});
  }
  m["methods"] = json::array();
  for (const auto& meth : config.methods) {
    m["methods"].push_back({{"name", meth.name},
                            {"slug", meth.slug},
                            {"group", meth.group},
                            {"vanilla", meth.vanilla},
                            {"dynamics", meth.dynamics_json},
                            {"noise", meth.noise_json}});
  }
  m["seeds"] = json::array();
  for (std::size_t r = 0; r < config.n_runs; ++r) m["seeds"].push_back(run_seed(config, r));
  m["runs"] = json::array();
  for (const auto& s : summary.runs) {
    json entry = {{"method", config.methods[s.method].slug},
                  {"benchmark", config.benchmarks[s.benchmark].slug},
                  {"run", s.run},
                  {"seed", s.seed},
                  {"trace", trace_path("", config.methods[s.method].slug,
                                       config.benchmarks[s.benchmark].slug, s.run)
                                .generic_string()},
                  {"status", s.diverged_iteration ? "diverged" : "ok"}};
    entry["diverged_iteration"] = s.diverged_iteration ? json(*s.diverged_iteration) : json(nullptr);
    m["runs"].push_back(std::move(entry));
  }
  m["diverged_runs"] = summary.diverged_runs;
  return m;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, unsigned jobs, std::ostream* log) {
  ExperimentSummary summary;
  for (std::size_t m = 0; m < config.methods.size(); ++m)
    for (std::size_t b = 0; b < config.benchmarks.size(); ++b)
      for (std::size_t r = 0; r < config.n_runs; ++r)
        summary.runs.push_back({m, b, r, run_seed(config, r), std::nullopt});
  summary.total_runs = summary.runs.size();

  fs::create_directories(config.output);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, summary.total_runs)));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= summary.runs.size()) return;
      try {
        execute_one(config, summary.runs[k]);
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next.store(summary.runs.size());
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (log && (finished % 50 == 0 || finished == summary.total_runs)) {
        std::lock_guard lock(log_mutex);
        *log << "  " << finished << "/" << summary.total_runs << " runs\n" << std::flush;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  summary.diverged_runs = static_cast<std::size_t>(std::count_if(
      summary.runs.begin(), summary.runs.end(),
      [](const RunStatus& s) { return s.diverged_iteration.has_value(); }));
  const double fraction =
      static_cast<double>(summary.diverged_runs) / static_cast<double>(summary.total_runs);
  summary.exit_status = fraction > config.max_diverged_fraction ? kExitDiverged : kExitOk;

  write_file_atomic(config.output / kManifestName, make_manifest(config, summary).dump(2) + "\n");
  return summary;
}

}  // namespace mkvnoise::harness
