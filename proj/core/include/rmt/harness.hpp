#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rmt/experiments.hpp"

namespace rmt {

enum class ExperimentKind {
  locallaw,
  entrywise,
  delocalization,
  ladder,
  gaps,
  correlation,
  flow_equivalence,
  deviation,
  continuity,
  admissibility,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One experiment, fully determined by its canonical JSON form.
///
///   {"kind": "locallaw",
///    "ensemble": {"kind": "wigner", "n": 2000, "law": {"kind": "student_t", "tail_index": 2.6},
///                 "profile": "flat", "amplitude": 0, "eps": 0.5, "c1": 0.5, "C1": 2, "C2": 8},
///    "seeds": [1, 2, 3] | {"first": 1, "count": 20},
///    "params": {...},
///    "output_dir": "runs/locallaw"}
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::continuity;
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;
  io::json params = io::json::object();
  std::filesystem::path output_dir;

  io::json to_json() const;  // canonical: defaults filled in, seeds expanded
  std::string hash() const;  // SHA-256 of the canonical text
};

/// Field-level validation; errors are invalid_config with a "field: reason" message.
ExperimentConfig parse_config(const io::json& j);

/// Reads a config file. A relative output_dir resolves against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a numeric override. `axis` is N/n, eps, amplitude, tail_index or a
/// key of params; anything else is invalid_config.
ExperimentConfig with_axis(const ExperimentConfig& base, const std::string& axis, double value);

struct FileEntry {
  std::string path;  // relative to the run directory
  std::string sha256;
  Index bytes = 0;
};

struct TaskStatus {
  std::string name;
  std::string status;  // ok | fail | error
  std::string message;
};

enum class RunStatus { pass, fail, error };
std::string to_string(RunStatus s);
int exit_code(RunStatus s);  // 0, 1, 2

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  ExperimentKind kind = ExperimentKind::continuity;
  RunStatus status = RunStatus::error;
  std::vector<TaskStatus> tasks;
  double wall_clock_seconds = 0.0;
  Index workers = 1;
  std::vector<FileEntry> files;
  io::json summary = io::json::object();

  io::json to_json() const;
  static RunManifest from_json(const io::json& j);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Dispatches to the experiment pipeline, writes config.json, summary.json,
/// the pipeline's tables and manifest.json into config.output_dir. Files
/// listed by a previous manifest are replaced; any other entry in the
/// directory is an io error.
RunManifest run(const ExperimentConfig& config);

/// Pipeline only, without touching the file system.
experiments::Outcome execute(const ExperimentConfig& config);

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<RunManifest> runs;
  RunStatus status = RunStatus::pass;  // worst over runs
};

/// One run per value in output_dir/<axis>=<value>, plus sweep_summary.csv and
/// sweep_manifest.json in output_dir.
SweepResult sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values);

struct ReportResult {
  RunStatus status = RunStatus::error;
  bool files_ok = true;
  std::vector<std::string> problems;
  std::string text;
};

/// Verifies the hashes of every listed file and renders a short summary.
/// Accepts run manifests and sweep manifests.
ReportResult report(const std::filesystem::path& manifest);

std::string tool_version();

}  // namespace rmt
