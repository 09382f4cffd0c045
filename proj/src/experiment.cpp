#include "hwsim/experiment.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

namespace hwsim {

void parallel_for(long count, int workers, const std::function<void(long)>& body) {
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto loop = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<long>(workers, count));
  pool.reserve(k);
  for (int w = 0; w < k; ++w) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RepOutput simulate_replication(const ExperimentConfig& cfg, long n, std::uint64_t rep,
                               const CollectOptions& what) {
  RngStream env_rng(derive_seed(cfg.seed, n, rep, StreamRole::environment));
  RngStream init_rng(derive_seed(cfg.seed, n, rep, StreamRole::initial));
  RngStream arr_rng(derive_seed(cfg.seed, n, rep, StreamRole::arrivals));
  RngStream svc_rng(derive_seed(cfg.seed, n, rep, StreamRole::service));
  RngStream pol_rng(derive_seed(cfg.seed, n, rep, StreamRole::policy));

  const InitialDraw draw = sample_xi0_nu(cfg.initial, init_rng);
  EnvironmentRealization env = realize_environment(cfg.rates, n, draw.nu, env_rng);
  const bool sorted = cfg.policy == PolicyKind::P2 ||
                      cfg.initial.placement == IdlePlacement::FastestBusy;
  if (sorted) env.sort_by_rate();
  const InitialState init = sample_initial_state(cfg.initial, env, draw.xi0, init_rng);

  RenewalArrivals arrivals(cfg.law, arrival_rate(n, cfg.limits.mu, cfg.lambda_hat),
                           arr_rng);

  std::unique_ptr<RoutingPolicy> policy;
  switch (cfg.policy) {
    case PolicyKind::P1:
      policy = std::make_unique<P1LongestIdle>();
      break;
    case PolicyKind::P2:
      policy = std::make_unique<P2FastestFirst>();
      break;
    case PolicyKind::Random:
      policy = std::make_unique<UniformRandomPolicy>(pol_rng);
      break;
  }

  const ServiceMechanism mech = cfg.mechanism == ServiceMode::Pooled
                                    ? ServiceMechanism::pooled(env)
                                    : ServiceMechanism::per_server();

  RecorderOptions ropt;
  ropt.sample_dt = cfg.sample_dt;
  ropt.record_intervals = what.fairness || what.record_intervals;
  ropt.record_events = what.record_events;
  ropt.fast_tilde_min = what.fast_tilde_min;
  PathRecorder recorder(env, ropt, cfg.horizon);
  InvariantRecorder guard(what.strict_invariants ? 1 : 4096);
  std::vector<Recorder*> recs{&recorder, &guard};

  Engine engine(env, init, *policy, arrivals, mech, cfg.horizon, recs, svc_rng);
  engine.run();

  RepOutput out;
  out.events = engine.events_processed();
  out.num_servers = env.num_servers;
  out.violations = guard.violations();
  PathRecord rec = recorder.take();
  out.fast_idle_sup = rec.fast_idle_sup;
  for (double t : what.marginal_times) out.marginals.push_back(xhat_at(rec, t));
  if (what.fairness)
    out.fairness = fairness_from_path(rec, what.fairness_s, what.fairness_c);
  if (what.keep_path) out.path = std::move(rec);
  return out;
}

std::vector<RepOutput> simulate_many(const ExperimentConfig& cfg, long n,
                                     std::uint64_t rep0, long count,
                                     const CollectOptions& what, int workers) {
  std::vector<RepOutput> out(count);
  parallel_for(count, workers, [&](long i) {
    out[i] = simulate_replication(cfg, n, rep0 + static_cast<std::uint64_t>(i), what);
  });
  return out;
}

std::vector<DiffusionPath> diffusion_paths(const ExperimentConfig& cfg, long paths,
                                           int workers,
                                           std::optional<DriftCoeff> drift_override) {
  DiffusionSpec spec;
  spec.sigma = std::sqrt(cfg.limits.sigma_sq);
  const DriftCoeff mode = drift_override.value_or(cfg.effective_drift());
  spec.g = mode == DriftCoeff::Gamma ? cfg.limits.gamma : cfg.limits.mu_min;
  spec.step = cfg.diffusion.step;
  spec.horizon = cfg.diffusion.horizon;

  std::vector<DiffusionPath> out(paths);
  parallel_for(paths, workers, [&](long i) {
    const auto rep = static_cast<std::uint64_t>(i);
    RngStream init_rng(derive_seed(cfg.seed, 0, rep, StreamRole::sde_init));
    RngStream zeta_rng(derive_seed(cfg.seed, 0, rep, StreamRole::sde_zeta));
    RngStream noise(derive_seed(cfg.seed, 0, rep, StreamRole::sde_noise));
    const DriftSample drift = sample_drift(cfg.limits, cfg.initial, init_rng, zeta_rng);
    out[i] = euler_path(drift, spec, noise);
  });
  return out;
}

}  // namespace hwsim
