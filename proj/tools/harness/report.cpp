#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "config.hpp"
#include "experiment.hpp"

namespace mkvnoise::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 3) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::size_t find_benchmark(const LoadedResults& res, const std::string& key) {
  for (std::size_t b = 0; b < res.benchmarks.size(); ++b)
    if (res.benchmarks[b].slug == key) return b;
  std::optional<std::size_t> hit;
  for (std::size_t b = 0; b < res.benchmarks.size(); ++b) {
    const auto& bench = res.benchmarks[b];
    if (bench.name == key || bench.display_name == key) {
      if (hit) throw HarnessError("benchmark '" + key + "' is ambiguous; use its slug", kExitConfig);
      hit = b;
    }
  }
  if (!hit) throw HarnessError("unknown benchmark '" + key + "'", kExitConfig);
  return *hit;
}

std::size_t find_method(const LoadedResults& res, const std::string& key) {
  for (std::size_t m = 0; m < res.methods.size(); ++m)
    if (res.methods[m].slug == key || res.methods[m].name == key) return m;
  throw HarnessError("unknown method '" + key + "'", kExitConfig);
}

}  // namespace

LoadedResults load_results(const fs::path& dir) {
  LoadedResults res;
  const fs::path manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw HarnessError("no manifest at " + manifest_path.string(), kExitMissingTraces);
  try {
    res.manifest = json::parse(in);
    for (const auto& b : res.manifest.at("benchmarks")) {
      res.benchmarks.push_back({b.at("name").get<std::string>(), b.at("display_name").get<std::string>(),
                                b.at("slug").get<std::string>(), b.at("known_min").get<double>()});
    }
    for (const auto& m : res.manifest.at("methods")) {
      res.methods.push_back({m.at("name").get<std::string>(), m.at("slug").get<std::string>(),
                             m.at("group").get<std::string>(), m.at("vanilla").get<bool>()});
    }
    res.n_runs = res.manifest.at("config").at("n_runs").get<std::size_t>();
    res.one_sided = res.manifest.at("config").at("sidedness").get<std::string>() == "one-sided";
  } catch (const json::exception& e) {
    throw HarnessError("malformed manifest " + manifest_path.string() + ": " + e.what(),
                       kExitMissingTraces);
  }

  const std::size_t nm = res.methods.size();
  const std::size_t nb = res.benchmarks.size();
  res.traces.assign(nm, std::vector<std::vector<TraceData>>(nb, std::vector<TraceData>(res.n_runs)));
  res.diverged.assign(nm, std::vector<std::vector<bool>>(nb, std::vector<bool>(res.n_runs, false)));

  try {
    for (const auto& r : res.manifest.at("runs")) {
      if (r.at("status").get<std::string>() != "diverged") continue;
      const auto m = find_method(res, r.at("method").get<std::string>());
      const auto b = find_benchmark(res, r.at("benchmark").get<std::string>());
      const auto k = r.at("run").get<std::size_t>();
      if (k < res.n_runs) res.diverged[m][b][k] = true;
    }
  } catch (const json::exception& e) {
    throw HarnessError("malformed manifest run list: " + std::string(e.what()), kExitMissingTraces);
  }

  std::vector<std::string> missing;
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t r = 0; r < res.n_runs; ++r) {
        const fs::path p = trace_path(dir, res.methods[m].slug, res.benchmarks[b].slug, r);
        if (!fs::exists(p)) {
          missing.push_back(p.string());
          continue;
        }
        res.traces[m][b][r] = read_trace(p);
      }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " trace file(s) missing:";
    for (const auto& p : missing) msg += "\n  " + p;
    throw HarnessError(msg, kExitMissingTraces);
  }
  return res;
}

std::vector<GroupTable> build_tables(const LoadedResults& res) {
  std::vector<GroupTable> tables;
  for (std::size_t m = 0; m < res.methods.size(); ++m) {
    auto it = std::find_if(tables.begin(), tables.end(),
                           [&](const GroupTable& t) { return t.group == res.methods[m].group; });
    if (it == tables.end()) {
      tables.push_back({});
      tables.back().group = res.methods[m].group;
      it = std::prev(tables.end());
    }
    if (res.methods[m].vanilla && !it->vanilla) it->vanilla = it->methods.size();
    it->methods.push_back(m);
  }

  const std::size_t nb = res.benchmarks.size();
  std::vector<double> known_min;
  for (const auto& b : res.benchmarks) known_min.push_back(b.known_min);

  for (auto& t : tables) {
    const std::size_t nm = t.methods.size();
    t.diverged.assign(nm, 0);
    for (std::size_t j = 0; j < nm; ++j) {
      const std::size_t m = t.methods[j];
      MethodResults mr{res.methods[m].name, std::vector<std::vector<double>>(nb)};
      for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t r = 0; r < res.n_runs; ++r) {
          if (res.diverged[m][b][r]) {
            ++t.diverged[j];
            continue;
          }
          mr.samples[b].push_back(res.traces[m][b][r].final_best());
        }
      t.results.push_back(std::move(mr));
    }
    t.means.assign(nb, std::vector<double>(nm));
    t.best.assign(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nm; ++j) {
        t.means[b][j] = t.results[j].mean(b);
        if (t.means[b][j] < best) {
          best = t.means[b][j];
          t.best[b] = j;
        }
      }
    }
    if (t.vanilla) {
      t.significance =
          significance_protocol(t.results, *t.vanilla, kSignificanceLevel, res.one_sided);
      for (std::size_t b = 0; b < nb; ++b) t.best[b] = t.significance[b].best_method;
    }
    t.avg_rank = average_rank(t.results);
    t.ecr = ecr(t.results, known_min);
  }
  return tables;
}

std::string format_tables(const LoadedResults& res, const std::vector<GroupTable>& tables) {
  std::ostringstream out;
  std::size_t name_width = 10;
  for (const auto& b : res.benchmarks) name_width = std::max(name_width, b.slug.size() + 2);
  for (const auto& t : tables) {
    std::vector<std::size_t> widths;
    for (std::size_t m : t.methods) widths.push_back(std::max<std::size_t>(12, res.methods[m].name.size() + 2));
    out << t.group << ": mean best value over " << res.n_runs << " runs ("
        << (res.one_sided ? "one-sided" : "two-sided") << " Mann-Whitney U; * = best mean";
    if (t.vanilla) out << ", ! = significant at " << kSignificanceLevel;
    out << ")\n";
    out << pad("Benchmark", name_width);
    for (std::size_t j = 0; j < t.methods.size(); ++j)
      out << pad(res.methods[t.methods[j]].name, widths[j]);
    out << "max p\n";
    for (std::size_t b = 0; b < res.benchmarks.size(); ++b) {
      const auto& bench = res.benchmarks[b];
      const bool shared = std::count_if(res.benchmarks.begin(), res.benchmarks.end(), [&](const auto& o) {
                            return o.display_name == bench.display_name;
                          }) > 1;
      out << pad(shared ? bench.slug : bench.display_name, name_width);
      const bool sig = !t.significance.empty() && t.significance[b].significant;
      for (std::size_t j = 0; j < t.methods.size(); ++j) {
        std::string cell = fixed(t.means[b][j]);
        if (j == t.best[b]) cell += sig ? "*!" : "*";
        out << pad(cell, widths[j]);
      }
      if (!t.significance.empty() && t.significance[b].max_p) out << fixed(*t.significance[b].max_p);
      out << "\n";
    }
    out << pad("Avg Rank", name_width);
    for (std::size_t j = 0; j < t.methods.size(); ++j) out << pad(fixed(t.avg_rank[j], 2), widths[j]);
    out << "\n" << pad("ECR", name_width);
    for (std::size_t j = 0; j < t.methods.size(); ++j) out << pad(fixed(t.ecr[j], 2), widths[j]);
    out << "\n";
    std::size_t total_div = 0;
    for (auto d : t.diverged) total_div += d;
    if (total_div > 0) {
      out << "Diverged runs excluded from means:";
      for (std::size_t j = 0; j < t.methods.size(); ++j)
        out << " " << res.methods[t.methods[j]].name << "=" << t.diverged[j];
      out << "\n";
    } else {
      out << "Diverged runs: none\n";
    }
    out << "\n";
  }
  return out.str();
}

std::string tables_csv(const LoadedResults& res, const std::vector<GroupTable>& tables) {
  std::string out = "group,row,method,value,best,max_p,significant\n";
  auto line = [&](const std::string& group, const std::string& row, const std::string& method,
                  double value, bool best, const std::string& max_p, bool significant) {
    out += group + "," + row + "," + method + "," + format_double(value) + "," +
           (best ? "1" : "0") + "," + max_p + "," + (significant ? "1" : "0") + "\n";
  };
  for (const auto& t : tables) {
    for (std::size_t b = 0; b < res.benchmarks.size(); ++b) {
      std::string max_p;
      bool sig = false;
      if (!t.significance.empty()) {
        if (t.significance[b].max_p) max_p = format_double(*t.significance[b].max_p);
        sig = t.significance[b].significant;
      }
      for (std::size_t j = 0; j < t.methods.size(); ++j)
        line(t.group, res.benchmarks[b].slug, res.methods[t.methods[j]].slug, t.means[b][j],
             j == t.best[b], max_p, sig && j == t.best[b]);
    }
    for (std::size_t j = 0; j < t.methods.size(); ++j)
      line(t.group, "avg_rank", res.methods[t.methods[j]].slug, t.avg_rank[j], false, "", false);
    for (std::size_t j = 0; j < t.methods.size(); ++j)
      line(t.group, "ecr", res.methods[t.methods[j]].slug, t.ecr[j], false, "", false);
    for (std::size_t j = 0; j < t.methods.size(); ++j)
      line(t.group, "diverged", res.methods[t.methods[j]].slug,
           static_cast<double>(t.diverged[j]), false, "", false);
  }
  return out;
}

std::string plot_data_csv(const LoadedResults& res, const std::string& benchmark,
                          const std::vector<std::string>& methods) {
  if (methods.empty()) throw HarnessError("plot-data needs at least one method", kExitConfig);
  const std::size_t b = find_benchmark(res, benchmark);
  std::vector<std::size_t> ms;
  for (const auto& key : methods) ms.push_back(find_method(res, key));

  const std::vector<std::size_t>* grid = nullptr;
  std::vector<std::vector<const TraceData*>> runs(ms.size());
  for (std::size_t j = 0; j < ms.size(); ++j) {
    for (std::size_t r = 0; r < res.n_runs; ++r) {
      if (res.diverged[ms[j]][b][r]) continue;
      const TraceData& tr = res.traces[ms[j]][b][r];
      if (!grid) grid = &tr.iterations;
      else if (tr.iterations != *grid)
        throw HarnessError("iteration grids differ between traces of " + res.benchmarks[b].slug,
                           kExitGridMismatch);
      runs[j].push_back(&tr);
    }
  }

  std::string out = "iteration";
  for (std::size_t m : ms) out += "," + res.methods[m].slug + "_mean," + res.methods[m].slug + "_std";
  out += "\n";
  if (!grid) return out;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    out += std::to_string((*grid)[k]);
    for (std::size_t j = 0; j < ms.size(); ++j) {
      const auto& rs = runs[j];
      double mean = 0.0;
      for (const auto* tr : rs) mean += tr->best_values[k];
      mean /= static_cast<double>(rs.size());
      double ss = 0.0;
      for (const auto* tr : rs) ss += (tr->best_values[k] - mean) * (tr->best_values[k] - mean);
      const double sd = rs.size() > 1 ? std::sqrt(ss / static_cast<double>(rs.size() - 1)) : 0.0;
      out += "," + format_double(rs.empty() ? std::nan("") : mean) + "," + format_double(sd);
    }
    out += "\n";
  }
  return out;
}

}  // namespace mkvnoise::harness
