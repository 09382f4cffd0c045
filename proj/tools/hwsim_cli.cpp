// Command line front end: queueing simulation, limit-process integration,
// and the comparison/fairness/validation studies, all driven by one INI
// config file.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hwsim/commands.hpp"
#include "hwsim/engine.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  int workers = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("-c,--config", o.config, "experiment config file (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out", o.out, "output directory (overrides the config)");
  sub->add_option("-s,--seed", o.seed, "master seed (overrides the config)");
  sub->add_option("-w,--workers", o.workers, "worker threads")
      ->check(CLI::PositiveNumber);
}

int dispatch(const std::string& name, const CommonOpts& o) {
  hwsim::ExperimentConfig cfg = hwsim::load_config_file(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (name == "simulate") return hwsim::cmd_simulate(cfg, o.workers, std::cout);
  if (name == "diffusion") return hwsim::cmd_diffusion(cfg, o.workers, std::cout);
  if (name == "compare") return hwsim::cmd_compare(cfg, o.workers, std::cout);
  if (name == "fairness") return hwsim::cmd_fairness(cfg, o.workers, std::cout);
  if (name == "validate") return hwsim::cmd_validate(cfg, o.workers, std::cout);
  std::cerr << "unknown command " << name << "\n";
  return hwsim::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"many-server queue simulation and diffusion-limit toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  const char* names[] = {"simulate", "diffusion", "compare", "fairness", "validate"};
  const char* descs[] = {
      "run the queue simulation ladder and write path/marginal files",
      "integrate the limit process and write path/marginal files",
      "build convergence tables from simulate + diffusion outputs",
      "run the idle-period fairness study",
      "run invariant and reduced statistical checks",
  };
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descs[i]), opts);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return dispatch(name, opts);
  } catch (const hwsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return hwsim::kExitConfig;
  } catch (const hwsim::EngineError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return hwsim::kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hwsim::kExitInvariant;
  }
}
