#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwsim/arrivals.hpp"
#include "hwsim/engine.hpp"
#include "hwsim/environment.hpp"
#include "hwsim/diffusion.hpp"

namespace hwsim {

enum class PolicyKind { P1, P2, Random };

struct DiffusionSection {
  double step = 1e-3;
  double horizon = 1.0;
  long paths = 1000;
  DriftCoeff drift = DriftCoeff::Gamma;
  bool drift_set = false;  // default follows the policy when unset
};

struct FairnessSection {
  double s = 1.0;
  double c = 1.0;
};

// Everything one experiment needs, parsed from a single INI-style file.
struct ExperimentConfig {
  RateLawSpec rates;

  ArrivalFamily arrival_family = ArrivalFamily::Exponential;
  double c_u_sq = 1.0;
  int erlang_shape = 0;
  double lambda_hat = 0.0;

  InitialStateSpec initial;

  PolicyKind policy = PolicyKind::P1;
  ServiceMode mechanism = ServiceMode::PerServer;
  std::vector<long> ladder{100};
  long replications = 100;
  double horizon = 1.0;
  double sample_dt = 0.01;
  std::vector<double> report_times{1.0};
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  DiffusionSection diffusion;
  FairnessSection fairness;

  // derived on validate()
  LimitParams limits;
  InterarrivalLaw law;

  void validate();  // throws ConfigError with section/key context
  DriftCoeff effective_drift() const {
    if (diffusion.drift_set) return diffusion.drift;
    return policy == PolicyKind::P2 ? DriftCoeff::MuMin : DriftCoeff::Gamma;
  }
  double drift_g() const {
    return effective_drift() == DriftCoeff::Gamma ? limits.gamma : limits.mu_min;
  }
};

// Parses and validates. Error messages carry "line N" anchors where a
// specific key is at fault.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace hwsim
