#pragma once

#include <iosfwd>
#include <string>

#include "hwsim/config.hpp"

namespace hwsim {

// Exit codes shared by the subcommands and the CLI wrapper.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;  // invariant or statistical check failed
inline constexpr int kExitConfig = 2;     // bad configuration
inline constexpr int kExitMissing = 3;    // required input artifacts absent

// Each command writes its artifacts under cfg.out_dir and logs one line per
// artifact. All are deterministic in (config, seed); the worker count only
// changes the wall clock.
int cmd_simulate(const ExperimentConfig& cfg, int workers, std::ostream& log);
int cmd_diffusion(const ExperimentConfig& cfg, int workers, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, int workers, std::ostream& log);
int cmd_fairness(const ExperimentConfig& cfg, int workers, std::ostream& log);
int cmd_validate(const ExperimentConfig& cfg, int workers, std::ostream& log);

// File layout helpers (also used by compare to locate its inputs).
std::string marginal_file(const ExperimentConfig& cfg, long n, double t);
std::string sde_marginal_file(const ExperimentConfig& cfg, double t);
std::string paths_file(const ExperimentConfig& cfg, long n);

}  // namespace hwsim
