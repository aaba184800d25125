#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "degenwave/config.hpp"
#include "degenwave/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"degenwave: semi-finite traveling waves of the degenerate "
               "chemotaxis system"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = 0;
  for (const char* name :
       {"variational", "speed", "simulate", "classify", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--workers", workers, "sweep worker count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : degenwave::kExitUsage;
  }

  degenwave::RunConfig cfg;
  try {
    cfg = degenwave::resolve_config(degenwave::ConfigFile::load(config_path));
  } catch (const std::exception& e) {
    std::cerr << "degenwave: " << e.what() << "\n";
    std::cerr << "usage: degenwave <variational|speed|simulate|classify|sweep>"
                 " --config <path> [--out <dir>] [--workers <n>]\n";
    return degenwave::kExitUsage;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (workers > 0) cfg.workers = workers;

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "variational") return degenwave::cmd_variational(cfg);
  if (cmd == "speed") return degenwave::cmd_speed(cfg);
  if (cmd == "simulate") return degenwave::cmd_simulate(cfg);
  if (cmd == "classify") return degenwave::cmd_classify(cfg);
  return degenwave::cmd_sweep(cfg);
}
