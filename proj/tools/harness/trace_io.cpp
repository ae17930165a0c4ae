#include "trace_io.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "config.hpp"

namespace mkvnoise::harness {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string trace_csv(const std::vector<std::size_t>& iterations,
                      const std::vector<double>& best_values) {
  std::string out(kTraceHeader);
  out.push_back('\n');
  for (std::size_t k = 0; k < iterations.size(); ++k) {
    out += std::to_string(iterations[k]);
    out.push_back(',');
    out += format_double(best_values[k]);
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1)) + "-" +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_trace(const fs::path& path, const RunTrace& trace) {
  write_file_atomic(path, trace_csv(trace.iterations, trace.best_values));
}

TraceData read_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError("missing trace " + path.string(), kExitMissingTraces);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw HarnessError("bad trace header in " + path.string(), kExitMissingTraces);
  TraceData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw HarnessError("malformed trace line in " + path.string(), kExitMissingTraces);
    try {
      data.iterations.push_back(std::stoull(line.substr(0, comma)));
      data.best_values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw HarnessError("malformed trace line in " + path.string(), kExitMissingTraces);
    }
  }
  return data;
}

fs::path trace_path(const fs::path& root, std::string_view method_slug,
                    std::string_view benchmark_slug, std::size_t run) {
  char name[32];
  std::snprintf(name, sizeof name, "run_%04zu.csv", run);
  return root / "traces" / std::string(method_slug) / std::string(benchmark_slug) / name;
}

}  // namespace mkvnoise::harness
