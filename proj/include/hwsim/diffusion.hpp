#pragma once

#include <span>
#include <vector>

#include "hwsim/environment.hpp"
#include "hwsim/random.hpp"

namespace hwsim {

// One sampled drift configuration for the limit process. The random drift is
// beta = lambda_hat - E[hat] - zeta - mu*nu with zeta ~ N(0, zeta_var);
// table environments have zeta_var = 0 and nu = 0, collapsing to the
// deterministic beta = lambda_hat - E[hat].
struct DriftSample {
  double xi0 = 0.0;
  double nu = 0.0;
  double zeta = 0.0;
  double beta = 0.0;
};

DriftSample sample_drift(const LimitParams& params, const InitialStateSpec& init,
                         RngStream& init_rng, RngStream& zeta_rng);

// Which coefficient multiplies the reflection term xi^-: the two routing
// policies scale it differently (second-moment ratio vs. minimal rate).
enum class DriftCoeff { Gamma, MuMin };

struct DiffusionSpec {
  double sigma = 1.0;
  double g = 0.0;       // coefficient on max(-xi, 0)
  double step = 1e-3;
  double horizon = 1.0;
  long record_stride = 0;  // 0 = pick so that ~0.01 time units separate records
};

struct DiffusionPath {
  DriftSample drift;
  std::vector<double> t;
  std::vector<double> xi;
  double w_terminal = 0.0;  // driving Brownian endpoint, for diagnostics
};

// Euler-Maruyama for dxi = (beta + g*max(-xi,0))dt + sigma dw. The recorded
// grid always contains the endpoints.
DiffusionPath euler_path(const DriftSample& drift, const DiffusionSpec& spec,
                         RngStream& noise);

// Same scheme driven by the provided standard normals (one per step); used
// for step-coupling experiments.
DiffusionPath euler_path_from_normals(const DriftSample& drift,
                                      const DiffusionSpec& spec,
                                      std::span<const double> z);

// Marginal xi(t) across paths sharing one recording grid. Snaps t to the
// nearest recorded point; *snapped reports whether snapping moved it by more
// than 1e-9. Throws std::out_of_range when t exceeds the horizon.
std::vector<double> marginal_at(const std::vector<DiffusionPath>& paths, double t,
                                bool* snapped = nullptr);

}  // namespace hwsim
