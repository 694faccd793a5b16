// rmt: run, sweep and inspect experiments.
//
//   rmt run <config>
//   rmt sweep <config> --axis N --values 500,1000,2000
//   rmt report <manifest>
//
// Exit status: 0 pass, 1 acceptance predicate failed, 2 error.
// RMT_WORKERS bounds the worker pool.

#include <iostream>

#include <CLI11.hpp>

#include "rmt/harness.hpp"
#include "rmt/parallel.hpp"

namespace {

int run_command(const std::string& path) {
  const rmt::ExperimentConfig config = rmt::load_config(path);
  const rmt::RunManifest m = rmt::run(config);
  std::cout << rmt::to_string(m.kind) << ": " << rmt::to_string(m.status) << " (" << m.files.size() << " files in "
            << config.output_dir.string() << ", " << rmt::io::format_number(m.wall_clock_seconds) << " s)\n";
  for (const auto& t : m.tasks)
    if (t.status == "error") std::cerr << "task " << t.name << ": " << t.message << "\n";
  return rmt::exit_code(m.status);
}

int sweep_command(const std::string& path, const std::string& axis, const std::vector<double>& values) {
  const rmt::ExperimentConfig config = rmt::load_config(path);
  const rmt::SweepResult r = rmt::sweep(config, axis, values);
  for (std::size_t k = 0; k < r.runs.size(); ++k)
    std::cout << axis << "=" << rmt::io::format_number(r.values[k]) << ": " << rmt::to_string(r.runs[k].status) << "\n";
  std::cout << "summary: " << (config.output_dir / "sweep_summary.csv").string() << "\n";
  return rmt::exit_code(r.status);
}

int report_command(const std::string& path) {
  const rmt::ReportResult r = rmt::report(path);
  std::cout << r.text;
  return rmt::exit_code(r.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random matrix experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  std::string sweep_path, axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment once per axis value");
  sweep->add_option("config", sweep_path, "Base experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "N, eps, amplitude, tail_index or a numeric params key")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  std::string manifest_path;
  auto* report = app.add_subcommand("report", "Verify and summarize a run or sweep manifest");
  report->add_option("manifest", manifest_path, "manifest.json or sweep_manifest.json")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rmt::worker_count();  // reject a malformed RMT_WORKERS before doing any work
    if (*run) return run_command(config_path);
    if (*sweep) return sweep_command(sweep_path, axis, values);
    if (*report) return report_command(manifest_path);
  } catch (const rmt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
