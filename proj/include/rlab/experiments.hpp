#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/plot.hpp"
#include "rlab/table.hpp"

namespace rlab {

inline constexpr char kVersion[] = "rlab 1.0.0";

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "=="
  double bound = 0.0;
  bool pass = false;
};

Check make_check(const std::string& name, double value, const std::string& relation, double bound);

struct Artifact {
  std::string file;
  std::function<void(const std::string& path)> write;
};

struct ExperimentResult {
  ResultTable table;
  PlotSpec plot;
  std::vector<Check> checks;
  std::vector<Artifact> artifacts;
};

// Runs the sweep described by `config` with up to `jobs` threads. Output is the
// same for every jobs value.
ExperimentResult execute(const ExperimentConfig& config, int jobs = 1);

struct RunOptions {
  int jobs = 1;
  bool force = false;
  std::optional<std::uint64_t> seed;  // replaces run.seed
};

struct RunOutcome {
  std::string directory;
  bool reused = false;  // an earlier run with the same hash was complete
  int exit_code = 0;    // 0: every check passed, 2: some check failed
  ExperimentResult result;
  std::optional<PlotFit> fit;
};

// $RLAB_OUT, else run.output, else ./rlab_out.
std::string output_root(const ExperimentConfig& config);
// <experiment>-<fnv1a64 of the canonical config and kVersion, 16 hex digits>
std::string run_name(const ExperimentConfig& config);

// Writes config.echo, version.txt, <schema>.csv, figure.svg, checks.txt, any
// artifacts and finally the `done` marker into output_root/run_name. A complete
// run directory is reused unless options.force is set.
// Errors: Unwritable, module errors rethrown with the experiment name prefixed.
RunOutcome run(ExperimentConfig config, const RunOptions& options = {});

}  // namespace rlab
