#include <cstdio>
#include <exception>

#include "CLI11.hpp"

#include "rlab/config.hpp"
#include "rlab/error.hpp"
#include "rlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run one reproducible experiment sweep"};
  std::string experiment, config_path;
  rlab::RunOptions options;
  std::uint64_t seed = 0;
  app.add_option("experiment", experiment, "experiment to run")->required()->check(CLI::IsMember(rlab::experiment_names()));
  app.add_option("--config", config_path, "config file")->required();
  app.add_option("--jobs", options.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--force", options.force, "rerun even if a complete run exists");
  auto* seed_opt = app.add_option("--seed", seed, "override run.seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (*seed_opt) options.seed = seed;

  try {
    auto config = rlab::load_config(config_path, experiment);
    auto out = rlab::run(config, options);
    std::printf("%s %s\n", out.reused ? "reused" : "wrote", out.directory.c_str());
    for (const auto& k : out.result.checks)
      std::printf("  %s %s: %.6g %s %.6g\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), k.value, k.relation.c_str(),
                  k.bound);
    return out.exit_code;
  } catch (const rlab::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", rlab::to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return 1;
}
