#include <iostream>

#include "CLI11.hpp"
#include "cwstein/commands.hpp"
#include "cwstein/config.hpp"
#include "cwstein/numerics.hpp"
#include "cwstein/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stein-method experiments for Curie-Weiss models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cwstein::version_string());

  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out_dir;
  for (const auto& name : cwstein::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--workers", workers, "worker thread cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "artifact directory");
  }
  app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cwstein::kExitInvalid;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "schema") {
    std::cout << cwstein::dump_json(cwstein::config_schema());
    return 0;
  }
  cwstein::Overrides ov;
  if (chosen->count("--seed")) ov.seed = seed;
  if (chosen->count("--workers")) ov.workers = workers;
  if (chosen->count("--out")) ov.out = out_dir;
  cwstein::ExperimentConfig cfg;
  try {
    cfg = cwstein::parse_config(config_path, chosen->get_name(), ov);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cwstein::kExitInvalid;
  }
  std::cout << "config " << cfg.effective.dump() << "\n";
  const int code = cwstein::execute(cfg, std::cout);
  return code;
}
