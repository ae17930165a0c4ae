#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <set>

namespace mkvnoise::harness {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw HarnessError("config: " + what, kExitConfig);
}

void check_object(const json& doc, std::string_view where) {
  if (!doc.is_object()) schema_error(std::string(where) + " must be an object");
}

void check_keys(const json& doc, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  check_object(doc, where);
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema_error("unknown key '" + key + "' in " + std::string(where));
  }
}

double get_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) schema_error(std::string("'") + key + "' must be a number");
  return doc[key].get<double>();
}

std::int64_t get_integer(const json& doc, const char* key, std::int64_t fallback,
                         std::int64_t min_value) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number_integer()) schema_error(std::string("'") + key + "' must be an integer");
  const auto v = doc[key].get<std::int64_t>();
  if (v < min_value)
    schema_error(std::string("'") + key + "' must be >= " + std::to_string(min_value));
  return v;
}

bool get_bool(const json& doc, const char* key, bool fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_boolean()) schema_error(std::string("'") + key + "' must be a boolean");
  return doc[key].get<bool>();
}

std::string get_string(const json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_string()) schema_error(std::string("'") + key + "' must be a string");
  return doc[key].get<std::string>();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Observable parse_observable(const std::string& text) {
  const std::string key = lower(text);
  if (key == "mean") return Observable::Mean;
  if (key == "m2" || key == "second-moment") return Observable::SecondMoment;
  if (key == "var" || key == "variance") return Observable::Variance;
  if (key == "mean+var" || key == "mean-var" || key == "mean-plus-variance")
    return Observable::MeanPlusVariance;
  schema_error("unknown SMD observable '" + text + "'");
}

std::string observable_token(Observable obs) {
  switch (obs) {
    case Observable::Mean: return "mean";
    case Observable::SecondMoment: return "m2";
    case Observable::Variance: return "var";
    case Observable::MeanPlusVariance: return "mean+var";
  }
  return "?";
}

json dynamics_to_json(const DynamicsSpec& spec) {
  if (const auto* c = std::get_if<CboConfig>(&spec)) {
    return {{"family", "cbo"}, {"lambda", c->lambda}, {"gamma", c->gamma},
            {"alpha", c->alpha}, {"heaviside_eps", c->heaviside_eps}};
  }
  if (const auto* c = std::get_if<LangevinConfig>(&spec))
    return {{"family", "langevin"}, {"kappa", c->kappa}};
  if (const auto* c = std::get_if<SbsConfig>(&spec)) {
    json j = {{"family", "sbs"}, {"kappa", c->kappa}};
    j["bandwidth"] = c->bandwidth ? json(*c->bandwidth) : json(nullptr);
    return j;
  }
  return {{"family", "msgd"}};
}

json noise_to_json(const NoiseSpec& spec) {
  if (const auto* s = std::get_if<SmdSpec>(&spec)) {
    return {{"kind", "smd"},
            {"observable", observable_token(s->observable)},
            {"delta", s->delta},
            {"beta", s->beta},
            {"floor", s->floor},
            {"policy", s->policy == SingularityPolicy::Clamp ? "clamp" : "abort"}};
  }
  if (const auto* g = std::get_if<GcnSpec>(&spec)) {
    return {{"kind", "gcn"},
            {"bandwidth", g->bandwidth},
            {"beta", g->beta},
            {"eig_clamp_rel", g->eig_clamp_rel},
            {"sqrt_refresh_every", g->sqrt_refresh_every}};
  }
  return {{"kind", "none"}};
}

std::string method_name(const std::string& group, const NoiseSpec& noise) {
  if (const auto* s = std::get_if<SmdSpec>(&noise))
    return "SMD-" + group + " " + std::string(observable_name(s->observable));
  if (std::holds_alternative<GcnSpec>(noise)) return "GCN-" + group;
  return group;
}

// Variant token -> noise document, merged with shared smd / gcn settings.
json variant_noise(const std::string& token, const json& smd, const json& gcn) {
  const std::string key = lower(token);
  if (key == "vanilla" || key == "none") return {{"kind", "none"}};
  if (key == "gcn") {
    json j = gcn;
    j["kind"] = "gcn";
    return j;
  }
  if (key.rfind("smd-", 0) == 0) {
    json j = smd;
    j["kind"] = "smd";
    j["observable"] = key.substr(4);
    return j;
  }
  schema_error("unknown method variant '" + token + "'");
}

void add_method(ExperimentConfig& cfg, const json& dynamics_doc, const json& noise_doc,
                const std::string& group_override, const std::string& name_override) {
  MethodSpec m;
  m.dynamics = parse_dynamics(dynamics_doc);
  m.noise = parse_noise(noise_doc);
  m.group = group_override.empty() ? std::string(family_name(m.dynamics)) : group_override;
  m.name = name_override.empty() ? method_name(m.group, m.noise) : name_override;
  m.slug = slugify(m.name);
  m.vanilla = std::holds_alternative<NoNoise>(m.noise);
  m.dynamics_json = dynamics_to_json(m.dynamics);
  m.noise_json = noise_to_json(m.noise);
  cfg.methods.push_back(std::move(m));
}

}  // namespace

std::string slugify(std::string_view text) {
  std::string out;
  bool dash = false;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (dash && !out.empty()) out.push_back('-');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      dash = false;
    } else {
      dash = true;
    }
  }
  return out;
}

std::string_view boundary_name(BoundaryPolicy policy) {
  switch (policy) {
    case BoundaryPolicy::Clamp: return "clamp";
    case BoundaryPolicy::Reflect: return "reflect";
    case BoundaryPolicy::None: return "none";
  }
  return "?";
}

DynamicsSpec parse_dynamics(const json& doc) {
  check_object(doc, "dynamics");
  const std::string family = lower(get_string(doc, "family", ""));
  DynamicsSpec spec;
  if (family == "msgd") {
    check_keys(doc, {"family"}, "msgd dynamics");
    spec = MsgdConfig{};
  } else if (family == "langevin") {
    check_keys(doc, {"family", "kappa"}, "langevin dynamics");
    spec = LangevinConfig{get_number(doc, "kappa", 1.0)};
  } else if (family == "cbo") {
    check_keys(doc, {"family", "lambda", "gamma", "alpha", "heaviside_eps"}, "cbo dynamics");
    CboConfig c;
    c.lambda = get_number(doc, "lambda", c.lambda);
    c.gamma = get_number(doc, "gamma", c.gamma);
    c.alpha = get_number(doc, "alpha", c.alpha);
    c.heaviside_eps = get_number(doc, "heaviside_eps", c.heaviside_eps);
    spec = c;
  } else if (family == "sbs") {
    check_keys(doc, {"family", "kappa", "bandwidth"}, "sbs dynamics");
    SbsConfig c;
    c.kappa = get_number(doc, "kappa", c.kappa);
    if (doc.contains("bandwidth") && !doc["bandwidth"].is_null())
      c.bandwidth = get_number(doc, "bandwidth", 0.0);
    spec = c;
  } else {
    schema_error("unknown dynamics family '" + family + "'");
  }
  try {
    validate(spec);
  } catch (const ConfigError& e) {
    schema_error(e.what());
  }
  return spec;
}

NoiseSpec parse_noise(const json& doc) {
  if (doc.is_null()) return NoNoise{};
  check_object(doc, "noise");
  const std::string kind = lower(get_string(doc, "kind", "none"));
  NoiseSpec spec;
  if (kind == "none") {
    check_keys(doc, {"kind"}, "noise");
    spec = NoNoise{};
  } else if (kind == "smd") {
    check_keys(doc, {"kind", "observable", "delta", "beta", "floor", "policy"}, "smd noise");
    SmdSpec s;
    s.observable = parse_observable(get_string(doc, "observable", "mean+var"));
    s.delta = get_number(doc, "delta", s.delta);
    s.beta = get_number(doc, "beta", s.beta);
    s.floor = get_number(doc, "floor", s.floor);
    const std::string policy = lower(get_string(doc, "policy", "clamp"));
    if (policy == "clamp") s.policy = SingularityPolicy::Clamp;
    else if (policy == "abort") s.policy = SingularityPolicy::Abort;
    else schema_error("unknown singularity policy '" + policy + "'");
    spec = s;
  } else if (kind == "gcn") {
    check_keys(doc, {"kind", "bandwidth", "beta", "eig_clamp_rel", "sqrt_refresh_every"},
               "gcn noise");
    GcnSpec g;
    g.bandwidth = get_number(doc, "bandwidth", g.bandwidth);
    g.beta = get_number(doc, "beta", g.beta);
    g.eig_clamp_rel = get_number(doc, "eig_clamp_rel", g.eig_clamp_rel);
    g.sqrt_refresh_every = static_cast<int>(get_integer(doc, "sqrt_refresh_every", 1, 1));
    spec = g;
  } else {
    schema_error("unknown noise kind '" + kind + "' (one of none, smd, gcn)");
  }
  try {
    validate(spec);
  } catch (const ConfigError& e) {
    schema_error(e.what());
  }
  return spec;
}

ExperimentConfig parse_experiment(const json& doc) {
  try {
    check_keys(doc,
               {"schema_version", "benchmarks", "dim", "methods", "n_particles", "n_iters", "dt",
                "n_runs", "base_seed", "record_stride", "output", "normalize_by_dim",
                "sidedness", "boundary", "max_diverged_fraction", "annotations"},
               "experiment");
    if (get_integer(doc, "schema_version", 1, 1) != 1) schema_error("schema_version must be 1");

    ExperimentConfig cfg;
    cfg.n_particles = get_integer(doc, "n_particles", cfg.n_particles, 1);
    cfg.n_iters = static_cast<std::size_t>(get_integer(doc, "n_iters", 300, 0));
    cfg.dt = get_number(doc, "dt", cfg.dt);
    if (!(cfg.dt > 0.0)) schema_error("'dt' must be > 0");
    cfg.n_runs = static_cast<std::size_t>(get_integer(doc, "n_runs", 50, 1));
    cfg.base_seed = static_cast<std::uint64_t>(get_integer(doc, "base_seed", 0, 0));
    cfg.record_stride = get_integer(doc, "record_stride", 1, 1);
    cfg.output = get_string(doc, "output", cfg.output.string());
    cfg.max_diverged_fraction = get_number(doc, "max_diverged_fraction", 0.0);
    if (cfg.max_diverged_fraction < 0.0 || cfg.max_diverged_fraction > 1.0)
      schema_error("'max_diverged_fraction' must lie in [0, 1]");

    const std::string sided = lower(get_string(doc, "sidedness", "two-sided"));
    if (sided == "two-sided") cfg.sidedness = Sidedness::TwoSided;
    else if (sided == "one-sided") cfg.sidedness = Sidedness::OneSided;
    else schema_error("'sidedness' must be two-sided or one-sided");

    const std::string boundary = lower(get_string(doc, "boundary", "clamp"));
    if (boundary == "clamp") cfg.boundary = BoundaryPolicy::Clamp;
    else if (boundary == "reflect") cfg.boundary = BoundaryPolicy::Reflect;
    else if (boundary == "none") cfg.boundary = BoundaryPolicy::None;
    else schema_error("'boundary' must be clamp, reflect or none");

    if (doc.contains("annotations")) {
      check_object(doc["annotations"], "annotations");
      cfg.annotations = doc["annotations"];
    }

    const bool normalize = get_bool(doc, "normalize_by_dim", false);
    const auto default_dim = get_integer(doc, "dim", 20, 1);

    if (!doc.contains("benchmarks") || !doc["benchmarks"].is_array() || doc["benchmarks"].empty())
      schema_error("'benchmarks' must be a non-empty array");
    std::set<std::string> bench_slugs;
    for (const json& b : doc["benchmarks"]) {
      BenchmarkSpec spec;
      std::string name;
      if (b.is_string()) {
        name = b.get<std::string>();
        spec.dim = default_dim;
        spec.normalize_by_dim = normalize;
      } else {
        check_keys(b, {"name", "dim", "normalize_by_dim"}, "benchmark");
        name = get_string(b, "name", "");
        spec.dim = get_integer(b, "dim", default_dim, 1);
        spec.normalize_by_dim = get_bool(b, "normalize_by_dim", normalize);
      }
      try {
        const Objective obj =
            make_objective(name, spec.dim, ObjectiveOptions{spec.normalize_by_dim});
        spec.name = obj.name();
        spec.known_min_value = obj.known_min_value();
      } catch (const RegistryError& e) {
        schema_error(e.what());
      }
      for (const auto& entry : objective_registry())
        if (entry.name == spec.name) spec.display_name = entry.display_name;
      spec.slug = spec.name + "-d" + std::to_string(spec.dim) + (spec.normalize_by_dim ? "-norm" : "");
      if (!bench_slugs.insert(spec.slug).second) schema_error("duplicate benchmark " + spec.slug);
      cfg.benchmarks.push_back(std::move(spec));
    }

    if (!doc.contains("methods") || !doc["methods"].is_array() || doc["methods"].empty())
      schema_error("'methods' must be a non-empty array");
    for (const json& m : doc["methods"]) {
      check_keys(m, {"name", "group", "dynamics", "noise", "variants", "smd", "gcn"}, "method");
      if (!m.contains("dynamics")) schema_error("method without 'dynamics'");
      const std::string group = get_string(m, "group", "");
      if (m.contains("variants")) {
        if (m.contains("noise") || m.contains("name"))
          schema_error("'variants' cannot be combined with 'noise' or 'name'");
        if (!m["variants"].is_array() || m["variants"].empty())
          schema_error("'variants' must be a non-empty array");
        const json smd = m.value("smd", json::object());
        const json gcn = m.value("gcn", json::object());
        check_keys(smd, {"delta", "beta", "floor", "policy"}, "smd settings");
        check_keys(gcn, {"bandwidth", "beta", "eig_clamp_rel", "sqrt_refresh_every"},
                   "gcn settings");
        for (const json& v : m["variants"]) {
          if (!v.is_string()) schema_error("variants must be strings");
          add_method(cfg, m["dynamics"], variant_noise(v.get<std::string>(), smd, gcn), group, "");
        }
      } else {
        if (m.contains("smd") || m.contains("gcn"))
          schema_error("'smd'/'gcn' settings only apply together with 'variants'");
        add_method(cfg, m["dynamics"], m.value("noise", json{{"kind", "none"}}), group,
                   get_string(m, "name", ""));
      }
    }
    std::set<std::string> slugs;
    for (const auto& m : cfg.methods)
      if (!slugs.insert(m.slug).second) schema_error("duplicate method name '" + m.name + "'");
    return cfg;
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open config file " + path.string(), kExitConfig);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw HarnessError(std::string("config: ") + e.what(), kExitConfig);
  }
  return parse_experiment(doc);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["n_particles"] = cfg.n_particles;
  j["n_iters"] = cfg.n_iters;
  j["dt"] = cfg.dt;
  j["n_runs"] = cfg.n_runs;
  j["base_seed"] = cfg.base_seed;
  j["record_stride"] = cfg.record_stride;
  j["output"] = cfg.output.generic_string();
  j["sidedness"] = cfg.sidedness == Sidedness::TwoSided ? "two-sided" : "one-sided";
  j["boundary"] = std::string(boundary_name(cfg.boundary));
  j["max_diverged_fraction"] = cfg.max_diverged_fraction;
  j["annotations"] = cfg.annotations;
  j["benchmarks"] = json::array();
  for (const auto& b : cfg.benchmarks) {
    j["benchmarks"].push_back({{"name", b.name}, {"dim", b.dim},
                               {"normalize_by_dim", b.normalize_by_dim}});
  }
  j["methods"] = json::array();
  for (const auto& m : cfg.methods) {
    j["methods"].push_back({{"name", m.name}, {"group", m.group}, {"dynamics", m.dynamics_json},
                            {"noise", m.noise_json}});
  }
  return j;
}

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run) {
  return config.base_seed + static_cast<std::uint64_t>(run);
}

RunConfig make_run_config(const ExperimentConfig& config, const MethodSpec& method,
                          const BenchmarkSpec& benchmark, std::size_t run) {
  RunConfig rc;
  rc.objective = benchmark.name;
  rc.dim = benchmark.dim;
  rc.objective_options.normalize_by_dim = benchmark.normalize_by_dim;
  rc.dynamics = method.dynamics;
  rc.noise = method.noise;
  rc.n_particles = config.n_particles;
  rc.schedule = StepSchedule::constant(config.dt, config.n_iters);
  rc.seed = run_seed(config, run);
  rc.stream_id = 0;
  rc.record_stride = config.record_stride;
  rc.boundary = config.boundary;
  return rc;
}

}  // namespace mkvnoise::harness
