#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsim/random.hpp"

namespace hwsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One atom of a finite joint law on (base rate, perturbation).
struct RateAtom {
  double tilde = 0.0;
  double hat = 0.0;
  double prob = 0.0;
};

// One atom of a finite scalar law.
struct ScalarAtom {
  double value = 0.0;
  double prob = 0.0;
};

// Continuous component for the base-rate law: uniform on [a,b] or a normal
// truncated to [lo,hi]. A mixture is a weighted list of these.
struct TildeComponent {
  enum class Kind { Uniform, TruncNormal } kind = Kind::Uniform;
  double weight = 1.0;
  double a = 0.0, b = 0.0;               // uniform support
  double mean = 0.0, sd = 1.0;           // truncated normal parameters
  double lo = 0.0, hi = 0.0;             // truncation window
};

// How server rates are generated. Iid draws each server's pair
// independently; Table lays out deterministic per-atom counts (and forces
// the server count to n exactly).
enum class RateLawKind { Iid, Table };

struct RateLawSpec {
  RateLawKind kind = RateLawKind::Iid;

  // finite joint support; required for Table, one option for Iid
  std::vector<RateAtom> atoms;

  // continuous base-rate law with an independent finite perturbation law
  std::vector<TildeComponent> components;
  std::vector<ScalarAtom> hat_atoms;

  bool uses_atoms() const { return components.empty(); }
  void validate() const;  // throws ConfigError

  double max_abs_hat() const;
};

// Deterministic functionals of the rate law that parameterize the limit
// process: mean/variance of the base rate, the reflection drift
// coefficient gamma = E[tilde^2]/E[tilde], the essential infimum, and the
// diffusion coefficient sigma^2 = lambda*c2 + mu (critical load lambda=mu).
struct LimitParams {
  double mu = 0.0;
  double mu_hat_mean = 0.0;
  double var_tilde = 0.0;
  double gamma = 0.0;
  double mu_min = 0.0;
  double lambda_hat = 0.0;
  double c_u_sq = 0.0;
  double sigma_sq = 0.0;
  // variance of the sqrt(n)-scale empirical-mean fluctuation of the rates;
  // Var(tilde) for iid draws, 0 for table layouts
  double zeta_var = 0.0;
};

LimitParams derive_limit_params(const RateLawSpec& spec, double lambda_hat, double c_u_sq);

// One sampled n-th system environment: the server count and every server's
// rate decomposition. rates[k] == max(0, tilde + hat/sqrt(n)) always holds.
struct EnvironmentRealization {
  long n = 0;
  long num_servers = 0;
  std::vector<double> rates;
  std::vector<double> tilde_rates;
  std::vector<double> hat_rates;
  long clamp_count = 0;

  // ascending by realized rate, stable in the original index
  void sort_by_rate();
};

// nu perturbs the server count: N = clip(n + round(sqrt(n)*nu), 1, 2n).
// Table laws require nu == 0 and produce N = n with per-atom counts
// floor(n*p_l) plus one extra for the first atoms in index order; the count
// error per atom is then below the number of atoms.
EnvironmentRealization realize_environment(const RateLawSpec& spec, long n, double nu,
                                           RngStream& rng);

// Scalar law for the initial-offset and server-count perturbations.
struct ScalarLaw {
  enum class Kind { Point, Atoms, Normal } kind = Kind::Point;
  double value = 0.0;
  std::vector<ScalarAtom> atoms;
  double mean = 0.0, sd = 0.0;

  void validate(const std::string& what) const;
  double sample(RngStream& rng) const;
  double quantile(double u) const;
  double mean_value() const;

  static ScalarLaw point(double v) {
    ScalarLaw l;
    l.kind = Kind::Point;
    l.value = v;
    return l;
  }
};

// Where initially idle servers sit. P1 experiments spread the idle set
// uniformly at random; P2 experiments idle the slowest block so that the
// busy set is exactly the fastest X0 servers.
enum class IdlePlacement { RandomUniform, FastestBusy };

struct InitialStateSpec {
  ScalarLaw xi0_law = ScalarLaw::point(0.0);
  ScalarLaw nu_law = ScalarLaw::point(0.0);
  bool independent = true;
  IdlePlacement placement = IdlePlacement::RandomUniform;
};

struct InitialDraw {
  double xi0 = 0.0;
  double nu = 0.0;
};

// Draws (xi0, nu). When independent is false the pair is coupled through a
// single shared uniform (comonotone), which preserves both marginals.
InitialDraw sample_xi0_nu(const InitialStateSpec& spec, RngStream& rng);

struct InitialState {
  long long x0 = 0;                // customers present at time zero
  long long q0 = 0;                // of which queued
  std::vector<std::uint8_t> busy0;
  bool clamped = false;            // x0 hit the floor at zero
};

// X0 = max(0, N + round(sqrt(n)*xi0)); the busy set has size min(X0, N)
// placed per the [placement] rule, and the overflow queues.
InitialState sample_initial_state(const InitialStateSpec& spec,
                                  const EnvironmentRealization& env, double xi0,
                                  RngStream& rng);

}  // namespace hwsim
