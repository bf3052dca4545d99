#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "noiselab/errors.hpp"
#include "noiselab/harness/acceptance.hpp"
#include "noiselab/harness/config.hpp"
#include "noiselab/harness/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory: transport and flows driven by rough drift plus noise"};
  app.require_subcommand(1);

  std::string scenario_name, config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run one scenario and write its CSV artifacts");
  run->add_option("scenario", scenario_name, "scenario name (see the list subcommand)");
  run->add_option("--config", config_path, "JSON config file (strict keys)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "output directory (default from config)");
  CLI::Option* workers_opt = run->add_option("--workers", workers, "worker threads");
  run->add_flag("--quiet", quiet, "suppress the console report");

  CLI::App* list = app.add_subcommand("list", "print the scenario registry");

  std::string acc_out = "acceptance";
  int acc_workers = 1;
  bool acc_quiet = false;
  CLI::App* accept =
      app.add_subcommand("accept", "run the full gate twice and byte-compare the artifacts");
  accept->add_option("--out", acc_out, "output directory for both passes");
  accept->add_option("--workers", acc_workers, "worker threads");
  accept->add_flag("--quiet", acc_quiet, "suppress per-criterion progress");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      std::fputs(noiselab::list_scenarios().c_str(), stdout);
      return 0;
    }
    if (run->parsed()) {
      noiselab::ScenarioConfig cfg;
      if (!config_path.empty()) {
        cfg = noiselab::load_config_file(config_path);
        if (!scenario_name.empty() && scenario_name != cfg.scenario)
          throw noiselab::ValidationError("scenario argument '" + scenario_name +
                                          "' disagrees with config scenario '" + cfg.scenario +
                                          "'");
      } else if (!scenario_name.empty()) {
        cfg = noiselab::default_config(scenario_name);
      } else {
        throw noiselab::ValidationError("run needs a scenario name or --config");
      }
      if (seed_opt->count() > 0) cfg.seed = seed;
      if (workers_opt->count() > 0) cfg.workers = workers;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const noiselab::RunReport rep = noiselab::run_scenario(cfg);
      if (!quiet) std::fputs(noiselab::report_text(rep).c_str(), stdout);
      return 0;
    }
    const noiselab::AcceptanceReport rep =
        noiselab::run_acceptance(acc_out, acc_workers, acc_quiet);
    std::fputs(noiselab::acceptance_table(rep).c_str(), stdout);
    return rep.all_pass() ? 0 : 3;
  } catch (const noiselab::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const noiselab::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
