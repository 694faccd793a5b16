#include "rmt/harness.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "rmt/parallel.hpp"

#ifndef RMT_VERSION
#define RMT_VERSION "0.0.0"
#endif

namespace rmt {

namespace fs = std::filesystem;
using io::json;
namespace ex = experiments;

std::string tool_version() { return RMT_VERSION; }

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::locallaw, "locallaw"},
    {ExperimentKind::entrywise, "entrywise"},
    {ExperimentKind::delocalization, "delocalization"},
    {ExperimentKind::ladder, "ladder"},
    {ExperimentKind::gaps, "gaps"},
    {ExperimentKind::correlation, "correlation"},
    {ExperimentKind::flow_equivalence, "flow_equivalence"},
    {ExperimentKind::deviation, "deviation"},
    {ExperimentKind::continuity, "continuity"},
    {ExperimentKind::admissibility, "admissibility"},
};

[[noreturn]] void config_error(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::invalid_config, field + ": " + reason);
}

// Reads the members of one JSON object, recording which keys were consumed so
// that unknown keys can be reported by name.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number()) config_error(field(key), "expected a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  double positive(const std::string& key, double def) {
    const double v = number(key, def);
    if (!(v > 0.0)) config_error(field(key), "must be positive");
    return v;
  }

  double unit_interval(const std::string& key, double def) {
    const double v = number(key, def);
    if (!(v >= 0.0 && v <= 1.0)) config_error(field(key), "must lie in [0, 1]");
    return v;
  }

  Index count(const std::string& key, Index def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) config_error(field(key), "expected a non-negative integer");
    return v->get<Index>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_string()) config_error(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_array() || v->empty()) config_error(field(key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) config_error(field(key), "expected a non-empty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<Seed> seeds(const std::string& key, std::vector<Seed> def) {
    const json* v = get(key);
    if (!v) return def;
    return parse_seeds(*v, field(key));
  }

  static std::vector<Seed> parse_seeds(const json& v, const std::string& where) {
    if (v.is_array()) {
      std::vector<Seed> out;
      for (const auto& x : v) {
        if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
          config_error(where, "seeds must be non-negative integers");
        out.push_back(x.get<Seed>());
      }
      if (out.empty()) config_error(where, "at least one seed is required");
      return out;
    }
    if (v.is_object()) {
      Fields f(v, where);
      const Index first = f.count("first", 1);
      const Index count = f.count("count", 0);
      f.finish();
      if (count == 0) config_error(where + ".count", "must be at least 1");
      return ex::seed_range(first, count);
    }
    config_error(where, "expected a list of seeds or {\"first\", \"count\"}");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) config_error(field(key), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

EntryLaw parse_law(const json& j, const std::string& where) {
  Fields f(j, where);
  EntryLaw law;
  try {
    law.kind = law_kind_from_string(f.string("kind", "gaussian"));
  } catch (const Error& e) {
    config_error(f.field("kind"), e.what());
  }
  law.tail_index = f.number("tail_index", 0.0);
  law.target_variance = f.number("target_variance", 1.0);
  f.finish();
  try {
    law.validate();
  } catch (const Error& e) {
    config_error(where, e.what());
  }
  return law;
}

json law_json(const EntryLaw& law) {
  json j{{"kind", to_string(law.kind)}, {"target_variance", law.target_variance}};
  if (law.heavy_tailed()) j["tail_index"] = law.tail_index;
  return j;
}

EnsembleSpec parse_ensemble(const json& j, const std::string& where) {
  Fields f(j, where);
  EnsembleSpec s;
  const std::string kind = f.string("kind", "wigner");
  if (kind == "goe") {
    s.kind = EnsembleSpec::Kind::goe;
  } else if (kind != "wigner") {
    config_error(f.field("kind"), "expected \"wigner\" or \"goe\"");
  }
  s.n = f.count("n", 0);
  if (s.n < 2) config_error(f.field("n"), "must be at least 2");
  if (const json* law = f.get("law")) s.law = parse_law(*law, f.field("law"));
  try {
    s.profile = profile_kind_from_string(f.string("profile", "flat"));
  } catch (const Error& e) {
    config_error(f.field("profile"), e.what());
  }
  s.amplitude = f.number("amplitude", 0.0);
  s.constants.eps = f.positive("eps", s.constants.eps);
  s.constants.c1 = f.positive("c1", s.constants.c1);
  s.constants.C1 = f.positive("C1", s.constants.C1);
  s.constants.C2 = f.positive("C2", s.constants.C2);
  f.finish();
  if (s.kind == EnsembleSpec::Kind::wigner) {
    try {
      check_moment_assumption(s.law, s.constants.eps);
    } catch (const Error& e) {
      config_error(f.field("law.tail_index"), e.what());
    }
  }
  return s;
}

json ensemble_json(const EnsembleSpec& s) {
  return {{"kind", s.kind == EnsembleSpec::Kind::goe ? "goe" : "wigner"},
          {"n", s.n},
          {"law", law_json(s.law)},
          {"profile", to_string(s.profile)},
          {"amplitude", s.amplitude},
          {"eps", s.constants.eps},
          {"c1", s.constants.c1},
          {"C1", s.constants.C1},
          {"C2", s.constants.C2}};
}

EnsembleSpec goe_like(const EnsembleSpec& s) {
  EnsembleSpec g;
  g.kind = EnsembleSpec::Kind::goe;
  g.n = s.n;
  g.constants = s.constants;
  return g;
}

std::optional<EnvelopeConstants> parse_envelope(Fields& f, const std::string& key, double c_default) {
  const json* v = f.get(key);
  if (!v) return std::nullopt;
  Fields e(*v, f.field(key));
  EnvelopeConstants out;
  out.C = e.positive("C", 1.0);
  out.c = e.positive("c", c_default);
  out.xi = e.number("xi", 1.0);
  e.finish();
  return out;
}

Seed second_seed(const ExperimentConfig& c) {
  return c.seeds.size() > 1 ? c.seeds[1] : derive_seed(c.seeds[0], stream_tag::replica, 0x5eed);
}

// --- per-kind builders (validate params and build the typed experiment) --------

ex::LocalLawExperiment build_locallaw(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::LocalLawExperiment e;
  e.ensemble = c.ensemble;
  e.seeds = c.seeds;
  e.kappa = f.number("kappa", e.kappa);
  if (!(e.kappa > 0.0 && e.kappa < 1.0)) config_error("params.kappa", "must lie in (0, 1)");
  e.energy_count = f.count("energy_count", e.energy_count);
  if (e.energy_count == 0) config_error("params.energy_count", "must be at least 1");
  e.eta_min = f.number("eta_min", 0.0);
  const std::string floor = f.string("eta_floor", "explicit");
  if (floor != "explicit" && floor != "phi_n") config_error("params.eta_floor", "expected \"explicit\" or \"phi_n\"");
  e.phi_floor = floor == "phi_n";
  e.envelope = parse_envelope(f, "envelope", 0.05);
  e.calibration.seeds = ex::seed_range(100001, 50);
  if (const json* cal = f.get("calibration")) {
    Fields k(*cal, "params.calibration");
    e.calibration.seeds = k.seeds("seeds", e.calibration.seeds);
    e.calibration.c = k.positive("c", e.calibration.c);
    e.calibration.xi = k.number("xi", e.calibration.xi);
    e.calibration.margin = k.number("margin", e.calibration.margin);
    if (const json* law = k.get("heavy_law")) e.calibration.heavy = parse_law(*law, "params.calibration.heavy_law");
    k.finish();
  }
  e.coverage_required = f.unit_interval("coverage_required", e.coverage_required);
  e.seed_fraction = f.unit_interval("seed_fraction", e.seed_fraction);
  e.entry_stride = f.count("entry_stride", e.entry_stride);
  f.finish();
  return e;
}

ex::EntrywiseExperiment build_entrywise(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::EntrywiseExperiment e;
  e.ensemble = c.ensemble;
  e.seeds = c.seeds;
  const auto z = f.numbers("z", {e.z.real(), e.z.imag()});
  if (z.size() != 2 || !(z[1] > 0.0)) config_error("params.z", "expected [E, eta] with eta > 0");
  e.z = Complex(z[0], z[1]);
  e.bound = f.positive("bound", e.bound);
  e.label_trials = f.count("label_trials", e.label_trials);
  e.label_seed = f.count("label_seed", c.seeds[0]);
  e.admissibility.r_min = f.count("r_min", 0);
  e.admissibility.log_base = f.positive("log_base", e.admissibility.log_base);
  e.label_fraction = f.unit_interval("label_fraction", e.label_fraction);
  e.seed_fraction = f.unit_interval("seed_fraction", e.seed_fraction);
  f.finish();
  return e;
}

ex::DelocalizationExperiment build_delocalization(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::DelocalizationExperiment e;
  e.ensemble = c.ensemble;
  e.seeds = c.seeds;
  e.kappa = f.number("kappa", e.kappa);
  if (!(e.kappa > 0.0 && e.kappa < 2.0)) config_error("params.kappa", "must lie in (0, 2)");
  e.xi = f.number("xi", e.xi);
  e.constant = f.optional_number("constant");
  e.calibration_seeds = f.seeds("calibration_seeds", ex::seed_range(200001, 20));
  e.margin = f.number("margin", e.margin);
  e.seed_fraction = f.unit_interval("seed_fraction", e.seed_fraction);
  e.edge_fraction = f.unit_interval("edge_fraction", e.edge_fraction);
  f.finish();
  return e;
}

ex::LadderExperiment build_ladder(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::LadderExperiment e;
  e.ensemble = c.ensemble;
  e.seeds = c.seeds;
  e.energy = f.number("energy", e.energy);
  e.eta_min = f.number("eta_min", 0.0);
  if (auto env = parse_envelope(f, "envelope", 0.05)) e.envelope = *env;
  e.seed_fraction = f.unit_interval("seed_fraction", e.seed_fraction);
  f.finish();
  return e;
}

ex::UniversalityExperiment build_universality(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::UniversalityExperiment e;
  e.ensemble = c.ensemble;
  e.reference = goe_like(c.ensemble);
  if (const json* r = f.get("reference")) e.reference = parse_ensemble(*r, "params.reference");
  if (e.reference.n != e.ensemble.n) config_error("params.reference.n", "must equal ensemble.n");
  e.seed = c.seeds[0];
  e.reference_seed = second_seed(c);
  if (e.seed == e.reference_seed) config_error("seeds", "ensemble and reference need distinct seeds");
  e.replicas = f.count("replicas", e.replicas);
  if (e.replicas < 2) config_error("params.replicas", "must be at least 2");
  e.kappa = f.number("kappa", e.kappa);
  e.tolerance = f.positive("tolerance", e.tolerance);
  e.bootstrap_rounds = f.count("bootstrap_rounds", e.bootstrap_rounds);
  e.energy = f.number("energy", e.energy);
  e.bump_radius = f.positive("bump_radius", e.bump_radius);
  e.sigmas = f.positive("sigmas", e.sigmas);
  e.histogram_bins = f.count("histogram_bins", e.histogram_bins);
  f.finish();
  return e;
}

ex::FlowExperiment build_flow(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::FlowExperiment e;
  e.ensemble = c.ensemble;
  e.seed = c.seeds[0];
  e.replicas = f.count("replicas", e.replicas);
  if (e.replicas < 2) config_error("params.replicas", "must be at least 2");
  e.moment_times = f.numbers("moment_times", e.moment_times);
  for (double t : e.moment_times)
    if (!(t > 0.0)) config_error("params.moment_times", "times must be positive");
  e.delta = f.number("delta", e.delta);
  if (!(e.delta > 0.0 && e.delta < 1.0)) config_error("params.delta", "must lie in (0, 1)");
  e.alpha = f.unit_interval("alpha", e.alpha);
  e.sigmas = f.positive("sigmas", e.sigmas);
  f.finish();
  return e;
}

ex::DeviationExperiment build_deviation(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::DeviationExperiment e;
  e.seed = c.seeds[0];
  e.heavy = c.ensemble.law;
  e.eps = c.ensemble.constants.eps;
  e.sizes = {c.ensemble.n};
  if (f.has("sizes")) {
    e.sizes.clear();
    for (double s : f.numbers("sizes", {}))
      if (s >= 2.0 && s == std::floor(s)) {
        e.sizes.push_back(static_cast<Index>(s));
      } else {
        config_error("params.sizes", "sizes must be integers >= 2");
      }
  }
  if (const json* forms = f.get("forms")) {
    if (!forms->is_array() || forms->empty()) config_error("params.forms", "expected a non-empty array of names");
    e.forms.clear();
    for (const auto& x : *forms) {
      try {
        e.forms.push_back(deviation_form_from_string(x.get<std::string>()));
      } catch (const std::exception& err) {
        config_error("params.forms", err.what());
      }
    }
  }
  e.xi = f.numbers("xi", e.xi);
  e.calibration_xi = f.numbers("calibration_xi", e.calibration_xi);
  e.replicas = f.count("replicas", e.replicas);
  e.calibration_replicas = f.count("calibration_replicas", e.calibration_replicas);
  if (e.replicas == 0 || e.calibration_replicas == 0) config_error("params.replicas", "must be at least 1");
  e.delta = f.number("delta", e.delta);
  e.C = f.number("C", e.C);
  e.C_prime = f.number("C_prime", e.C_prime);
  if (!(e.C > 1.0) || !(e.C_prime > 1.0)) config_error("params.C", "C and C_prime must exceed 1");
  f.finish();
  if (!e.heavy.heavy_tailed()) config_error("ensemble.law", "the deviation sweep truncates a heavy-tailed law");
  return e;
}

ex::ContinuityExperiment build_continuity(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::ContinuityExperiment e;
  e.ensemble = c.ensemble;
  e.seeds = c.seeds;
  e.triples = f.count("triples", e.triples);
  if (e.triples == 0) config_error("params.triples", "must be at least 1");
  e.energy = f.optional_number("energy");
  e.eta = f.optional_number("eta");
  e.eta_prime = f.optional_number("eta_prime");
  if (e.eta && !(*e.eta > 0.0)) config_error("params.eta", "must be positive");
  if (e.eta_prime && !(*e.eta_prime >= 0.0)) config_error("params.eta_prime", "must be non-negative");
  f.finish();
  return e;
}

ex::AdmissibilityExperiment build_admissibility(const ExperimentConfig& c) {
  Fields f(c.params, "params");
  ex::AdmissibilityExperiment e;
  e.ensemble = c.ensemble;
  e.seed = c.seeds[0];
  e.trials = f.count("trials", e.trials);
  if (e.trials == 0) config_error("params.trials", "must be at least 1");
  e.config.r_min = f.count("r_min", 0);
  e.config.log_base = f.positive("log_base", e.config.log_base);
  e.required = f.unit_interval("required", e.required);
  f.finish();
  return e;
}

void validate_params(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::locallaw: build_locallaw(c); break;
    case ExperimentKind::entrywise: build_entrywise(c); break;
    case ExperimentKind::delocalization: build_delocalization(c); break;
    case ExperimentKind::ladder: build_ladder(c); break;
    case ExperimentKind::gaps:
    case ExperimentKind::correlation: build_universality(c); break;
    case ExperimentKind::flow_equivalence: build_flow(c); break;
    case ExperimentKind::deviation: build_deviation(c); break;
    case ExperimentKind::continuity: build_continuity(c); break;
    case ExperimentKind::admissibility: build_admissibility(c); break;
  }
}

// --- output directory ------------------------------------------------------------

std::set<std::string> listed_files(const fs::path& manifest) {
  std::set<std::string> out;
  const json j = json::parse(io::read_file(manifest));
  for (const auto& f : j.value("files", json::array())) out.insert(f.at("path").get<std::string>());
  return out;
}

// Removes the outputs of a previous run. Anything the previous manifest did
// not list is left alone and reported.
void clean_run_dir(const fs::path& dir) {
  if (!fs::exists(dir)) return;
  require(fs::is_directory(dir), ErrorCode::io, dir.string() + " is not a directory");
  std::set<std::string> known;
  const fs::path manifest = dir / kManifestName;
  if (fs::exists(manifest)) known = listed_files(manifest);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name != kManifestName && !known.count(name))
      throw Error(ErrorCode::io, "output directory " + dir.string() + " contains " + name +
                                     ", which no previous manifest lists; remove it or choose another output_dir");
  }
  for (const auto& name : known) fs::remove(dir / name);
  fs::remove(manifest);
}

FileEntry write_artifact(const fs::path& dir, const std::string& name, const std::string& content) {
  return {name, io::write_file(dir / name, content), content.size()};
}

std::string axis_dir_name(const std::string& axis, double value) { return axis + "=" + io::format_number(value); }

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [kind, n] : kKindNames)
    if (name == n) return kind;
  throw Error(ErrorCode::invalid_config, "kind: unknown experiment kind '" + name + "'");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pass: return "pass";
    case RunStatus::fail: return "fail";
    case RunStatus::error: return "error";
  }
  return "error";
}

int exit_code(RunStatus s) { return static_cast<int>(s); }

json ExperimentConfig::to_json() const {
  return {{"kind", to_string(kind)},
          {"ensemble", ensemble_json(ensemble)},
          {"seeds", seeds},
          {"params", params},
          {"output_dir", output_dir.generic_string()}};
}

std::string ExperimentConfig::hash() const { return io::sha256_hex(io::canonical(to_json())); }

ExperimentConfig parse_config(const json& j) {
  Fields f(j, "");
  ExperimentConfig c;
  const json* kind = f.get("kind");
  if (!kind || !kind->is_string()) config_error("kind", "required string");
  c.kind = experiment_kind_from_string(kind->get<std::string>());
  const json* ens = f.get("ensemble");
  if (!ens) config_error("ensemble", "required");
  c.ensemble = parse_ensemble(*ens, "ensemble");
  const json* seeds = f.get("seeds");
  if (!seeds) config_error("seeds", "required");
  c.seeds = Fields::parse_seeds(*seeds, "seeds");
  if (const json* p = f.get("params")) {
    if (!p->is_object()) config_error("params", "expected an object");
    c.params = *p;
  }
  c.output_dir = f.string("output_dir", "");
  if (c.output_dir.empty()) config_error("output_dir", "required");
  f.finish();
  validate_params(c);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
  }
  ExperimentConfig c = parse_config(j);
  if (c.output_dir.is_relative()) c.output_dir = (path.parent_path() / c.output_dir).lexically_normal();
  return c;
}

ExperimentConfig with_axis(const ExperimentConfig& base, const std::string& axis, double value) {
  json j = base.to_json();
  if (axis == "N" || axis == "n") {
    if (!(value >= 2.0) || value != std::floor(value)) config_error("axis " + axis, "values must be integers >= 2");
    j["ensemble"]["n"] = static_cast<Index>(value);
  } else if (axis == "eps" || axis == "amplitude") {
    j["ensemble"][axis] = value;
  } else if (axis == "tail_index") {
    j["ensemble"]["law"]["tail_index"] = value;
  } else {
    const std::string key = axis.rfind("params.", 0) == 0 ? axis.substr(7) : axis;
    if (!j["params"].contains(key) || !j["params"][key].is_number())
      config_error("axis " + axis, "not found; use N, eps, amplitude, tail_index or a numeric key of params");
    if (j["params"][key].is_number_integer()) {
      if (value != std::floor(value)) config_error("axis " + axis, "values must be integers");
      j["params"][key] = static_cast<long long>(value);
    } else {
      j["params"][key] = value;
    }
  }
  ExperimentConfig c = parse_config(j);
  c.output_dir = base.output_dir;
  return c;
}

json RunManifest::to_json() const {
  json files_j = json::array();
  for (const auto& f : files) files_j.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  json tasks_j = json::array();
  for (const auto& t : tasks) tasks_j.push_back({{"name", t.name}, {"status", t.status}, {"message", t.message}});
  return {{"config_hash", config_hash}, {"tool_version", tool_version},
          {"kind", rmt::to_string(kind)},  {"status", rmt::to_string(status)},
          {"tasks", tasks_j},              {"wall_clock_seconds", wall_clock_seconds},
          {"workers", workers},            {"files", files_j},
          {"summary", summary}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    const std::string s = j.at("status").get<std::string>();
    m.status = s == "pass" ? RunStatus::pass : s == "fail" ? RunStatus::fail : RunStatus::error;
    for (const auto& t : j.at("tasks"))
      m.tasks.push_back({t.at("name").get<std::string>(), t.at("status").get<std::string>(),
                         t.value("message", std::string())});
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    m.workers = j.value("workers", Index{1});
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(), f.at("bytes").get<Index>()});
    m.summary = j.value("summary", json::object());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

experiments::Outcome execute(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::locallaw: return ex::to_outcome(ex::run_locallaw(build_locallaw(c)));
    case ExperimentKind::entrywise: {
      const auto e = build_entrywise(c);
      return ex::to_outcome(e, ex::run_entrywise(e));
    }
    case ExperimentKind::delocalization: {
      const auto e = build_delocalization(c);
      return ex::to_outcome(e, ex::run_delocalization(e));
    }
    case ExperimentKind::ladder: return ex::to_outcome(ex::run_ladder(build_ladder(c)));
    case ExperimentKind::gaps: {
      const auto e = build_universality(c);
      return ex::to_outcome(e, ex::run_gaps(e));
    }
    case ExperimentKind::correlation: {
      const auto e = build_universality(c);
      return ex::to_outcome(e, ex::run_correlation(e));
    }
    case ExperimentKind::flow_equivalence: return ex::to_outcome(ex::run_flow(build_flow(c)));
    case ExperimentKind::deviation: return ex::to_outcome(ex::run_deviation(build_deviation(c)));
    case ExperimentKind::continuity: return ex::to_outcome(ex::run_continuity(build_continuity(c)));
    case ExperimentKind::admissibility: return ex::to_outcome(ex::run_admissibility(build_admissibility(c)));
  }
  throw Error(ErrorCode::invalid_config, "kind: unhandled");
}

RunManifest run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir;
  clean_run_dir(dir);
  fs::create_directories(dir);

  RunManifest m;
  m.config_hash = config.hash();
  m.tool_version = tool_version();
  m.kind = config.kind;
  m.workers = worker_count();
  m.tasks.push_back({"validate", "ok", ""});

  auto record_write = [&](const std::string& name, const std::string& content) {
    try {
      m.files.push_back(write_artifact(dir, name, content));
      m.tasks.push_back({"write:" + name, "ok", ""});
    } catch (const std::exception& e) {
      m.tasks.push_back({"write:" + name, "error", e.what()});
    }
  };

  record_write("config.json", config.to_json().dump(2) + "\n");
  bool computed = false;
  bool pass = false;
  try {
    experiments::Outcome o = execute(config);
    computed = true;
    pass = o.pass;
    m.summary = o.summary;
    m.tasks.push_back({"compute", o.pass ? "ok" : "fail", o.pass ? "" : "acceptance predicate not met"});
    record_write("summary.json", o.summary.dump(2) + "\n");
    for (const auto& a : o.artifacts) record_write(a.name, a.content);
  } catch (const std::exception& e) {
    m.tasks.push_back({"compute", "error", e.what()});
  }
  const bool write_error = std::any_of(m.tasks.begin(), m.tasks.end(), [](const TaskStatus& t) {
    return t.status == "error";
  });
  m.status = (!computed || write_error) ? RunStatus::error : pass ? RunStatus::pass : RunStatus::fail;
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file(dir / kManifestName, m.to_json().dump(2) + "\n");
  return m;
}

SweepResult sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values) {
  if (values.empty()) config_error("values", "at least one value is required");
  // Validate every override before running anything.
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(with_axis(base, axis, v));

  const fs::path dir = base.output_dir;
  const fs::path sweep_manifest = dir / "sweep_manifest.json";
  if (fs::exists(sweep_manifest)) {
    const json old = json::parse(io::read_file(sweep_manifest));
    for (const auto& r : old.value("runs", json::array())) {
      const fs::path sub = dir / r.get<std::string>();
      clean_run_dir(sub);
      if (fs::exists(sub) && fs::is_empty(sub)) fs::remove(sub);
    }
    for (const auto& f : old.value("files", json::array())) fs::remove(dir / f.at("path").get<std::string>());
    fs::remove(sweep_manifest);
  }
  fs::create_directories(dir);

  SweepResult out;
  out.axis = axis;
  out.values = values;
  json runs = json::array();
  for (std::size_t k = 0; k < configs.size(); ++k) {
    ExperimentConfig c = configs[k];
    const std::string sub = axis_dir_name(axis, values[k]);
    c.output_dir = dir / sub;
    out.runs.push_back(run(c));
    runs.push_back(sub);
    if (static_cast<int>(out.runs.back().status) > static_cast<int>(out.status)) out.status = out.runs.back().status;
  }

  // Summary: one row per value with every top-level numeric field of the run summaries.
  std::set<std::string> keys;
  for (const auto& r : out.runs)
    for (const auto& [key, value] : r.summary.items())
      if (value.is_number() || value.is_boolean()) keys.insert(key);
  std::vector<std::string> header = {axis, "status", "config_hash"};
  header.insert(header.end(), keys.begin(), keys.end());
  io::Csv csv(header);
  for (std::size_t k = 0; k < out.runs.size(); ++k) {
    const auto& r = out.runs[k];
    csv.row().add(values[k]).add(to_string(r.status)).add(r.config_hash);
    for (const auto& key : keys) {
      const json v = r.summary.value(key, json());
      if (v.is_boolean()) {
        csv.add(v.get<bool>() ? 1 : 0);
      } else if (v.is_number()) {
        csv.add(v.get<double>());
      } else {
        csv.add(std::string("nan"));
      }
    }
  }
  const FileEntry summary = write_artifact(dir, "sweep_summary.csv", csv.str());
  const json manifest = {{"axis", axis},
                         {"values", values},
                         {"base_config_hash", base.hash()},
                         {"tool_version", tool_version()},
                         {"status", to_string(out.status)},
                         {"runs", runs},
                         {"files", json::array({{{"path", summary.path}, {"sha256", summary.sha256}, {"bytes", summary.bytes}}})}};
  io::write_file(sweep_manifest, manifest.dump(2) + "\n");
  return out;
}

ReportResult report(const fs::path& path) {
  ReportResult r;
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::io, path.string() + ": " + e.what());
  }
  const fs::path dir = path.parent_path();
  std::ostringstream os;

  auto verify_files = [&](const fs::path& base, const json& files) {
    Index ok = 0;
    for (const auto& f : files) {
      const std::string rel = f.at("path").get<std::string>();
      const fs::path p = base / rel;
      if (!fs::exists(p)) {
        r.problems.push_back("missing " + p.string());
        continue;
      }
      if (io::sha256_hex(io::read_file(p)) != f.at("sha256").get<std::string>()) {
        r.problems.push_back("hash mismatch " + p.string());
        continue;
      }
      ++ok;
    }
    return ok;
  };

  if (j.contains("runs")) {
    os << "sweep over " << j.at("axis").get<std::string>() << " (" << j.at("runs").size() << " runs)\n";
    verify_files(dir, j.value("files", json::array()));
    RunStatus worst = RunStatus::pass;
    for (const auto& sub : j.at("runs")) {
      const ReportResult child = report(dir / sub.get<std::string>() / kManifestName);
      os << "  " << sub.get<std::string>() << ": " << to_string(child.status)
         << (child.files_ok ? "" : " (integrity problems)") << "\n";
      r.problems.insert(r.problems.end(), child.problems.begin(), child.problems.end());
      if (static_cast<int>(child.status) > static_cast<int>(worst)) worst = child.status;
    }
    r.status = worst;
  } else {
    const RunManifest m = RunManifest::from_json(j);
    const Index ok = verify_files(dir, j.at("files"));
    r.status = m.status;
    os << "kind: " << to_string(m.kind) << "\n"
       << "status: " << to_string(m.status) << "\n"
       << "config_hash: " << m.config_hash << "\n"
       << "tool_version: " << m.tool_version << "\n"
       << "wall_clock_seconds: " << io::format_number(m.wall_clock_seconds) << "\n"
       << "workers: " << m.workers << "\n"
       << "files: " << ok << "/" << m.files.size() << " verified\n";
    for (const auto& t : m.tasks)
      if (t.status != "ok") os << "task " << t.name << ": " << t.status << (t.message.empty() ? "" : " (" + t.message + ")") << "\n";
    for (const auto& [key, value] : m.summary.items())
      if (value.is_primitive()) os << "  " << key << " = " << value.dump() << "\n";
  }
  r.files_ok = r.problems.empty();
  for (const auto& p : r.problems) os << "problem: " << p << "\n";
  if (!r.files_ok) r.status = RunStatus::error;
  r.text = os.str();
  return r;
}

}  // namespace rmt
