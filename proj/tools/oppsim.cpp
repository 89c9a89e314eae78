#include "oppsim/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
  CLI::App app{"Opportunistic network routing experiments"};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seeds = 0;
  oppsim::ExperimentOptions options;
  app.add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: $OPPSIM_OUT, then experiment.out_dir, then ./results)");
  app.add_option("--seeds", seeds, "use seeds 1..N instead of the config's")->check(CLI::PositiveNumber);
  app.add_flag("--log-events", options.log_events, "write one event log per run");
  app.add_flag("--dry-run", options.dry_run, "print the run matrix and exit");
  app.add_option("--jobs", options.jobs, "runs executed concurrently")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try
  {
    auto config = oppsim::parse_config_file(config_path);
    if (seeds > 0)
    {
      config.seeds.clear();
      for (std::uint64_t s = 1; s <= seeds; ++s)
        config.seeds.push_back(s);
    }
    if (!out_dir.empty())
      options.out_dir = out_dir;
    else if (const char* env = std::getenv("OPPSIM_OUT"); env && *env)
      options.out_dir = env;
    else if (!config.out_dir.empty())
      options.out_dir = config.out_dir;
    else
      options.out_dir = "results";

    const auto result = oppsim::run_experiment(config, options, options.dry_run ? std::cout : std::cerr);
    if (!options.dry_run)
      std::cerr << "wrote " << options.out_dir.string() << '\n';
    return result.ok() ? 0 : 1;
  }
  catch (const oppsim::ValidationError& e)
  {
    std::cerr << "error: invalid configuration\n";
    for (const auto& issue : e.issues())
      std::cerr << "  " << issue << '\n';
  }
  catch (const oppsim::ParseError& e)
  {
    std::cerr << "error: " << config_path << ":" << e.line() << ": " << e.what() << '\n';
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
