#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hwsim/config.hpp"
#include "hwsim/diffusion.hpp"
#include "hwsim/observables.hpp"

namespace hwsim {

// What a replication should collect. Paths are heavy, marginals are cheap;
// acceptance and CLI drivers pick what they need.
struct CollectOptions {
  bool keep_path = false;
  bool record_events = false;
  bool record_intervals = false;  // forced on when fairness is requested
  bool strict_invariants = false; // full per-server scan after every event
  std::vector<double> marginal_times;
  bool fairness = false;
  double fairness_s = 1.0;
  double fairness_c = 1.0;
  std::optional<double> fast_tilde_min;
};

struct RepOutput {
  std::vector<double> marginals;  // xhat at each requested time
  std::optional<PathRecord> path;
  std::optional<FairnessSample> fairness;
  double fast_idle_sup = 0.0;
  long long events = 0;
  long num_servers = 0;
  long long violations = 0;
};

// Runs replication [rep] of the n-th system. Deterministic in
// (config seed, n, rep) regardless of scheduling.
RepOutput simulate_replication(const ExperimentConfig& cfg, long n, std::uint64_t rep,
                               const CollectOptions& what);

// Fan out replications rep0..rep0+count-1 over [workers] threads and return
// outputs in replication order. Worker count never changes the results.
std::vector<RepOutput> simulate_many(const ExperimentConfig& cfg, long n,
                                     std::uint64_t rep0, long count,
                                     const CollectOptions& what, int workers);

// Limit-process sample: [paths] Euler paths with per-path drift draws.
std::vector<DiffusionPath> diffusion_paths(const ExperimentConfig& cfg, long paths,
                                           int workers,
                                           std::optional<DriftCoeff> drift_override = {});

// Generic deterministic-order parallel loop used by the drivers.
void parallel_for(long count, int workers, const std::function<void(long)>& body);

}  // namespace hwsim
