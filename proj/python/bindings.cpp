// Python bindings for the main operations: statistics, limit-process
// sampling, and config-driven simulation marginals.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "hwsim/commands.hpp"
#include "hwsim/config.hpp"
#include "hwsim/diffusion.hpp"
#include "hwsim/experiment.hpp"
#include "hwsim/stats.hpp"

namespace py = pybind11;
using namespace hwsim;

namespace {

ExperimentConfig config_from_text(const std::string& text,
                                  std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = parse_config_text(text);
  if (seed) cfg.seed = *seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "many-server queue simulation and diffusion-limit toolkit";

  py::register_exception<ConfigError>(m, "ConfigError");

  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = ks_two_sample(a, b);
        return py::make_tuple(r.d, r.p_value);
      },
      py::arg("a"), py::arg("b"),
      "Two-sample KS distance and asymptotic p-value.");

  m.def(
      "wasserstein1",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return wasserstein1(a, b);
      },
      py::arg("a"), py::arg("b"), "First Wasserstein distance between samples.");

  m.def(
      "summarize",
      [](const std::vector<double>& v) {
        const auto s = summarize(v);
        py::dict d;
        d["count"] = s.count;
        d["mean"] = s.mean;
        d["variance"] = s.variance;
        d["ci_half"] = s.ci_half;
        return d;
      },
      py::arg("values"), "Mean, unbiased variance, and 95% CI half-width.");

  m.def(
      "limit_params",
      [](const std::string& config_text) {
        const ExperimentConfig cfg = parse_config_text(config_text);
        py::dict d;
        d["mu"] = cfg.limits.mu;
        d["mu_hat_mean"] = cfg.limits.mu_hat_mean;
        d["var_tilde"] = cfg.limits.var_tilde;
        d["gamma"] = cfg.limits.gamma;
        d["mu_min"] = cfg.limits.mu_min;
        d["sigma_sq"] = cfg.limits.sigma_sq;
        d["lambda_hat"] = cfg.limits.lambda_hat;
        d["c_u_sq"] = cfg.limits.c_u_sq;
        d["zeta_var"] = cfg.limits.zeta_var;
        d["drift_g"] = cfg.drift_g();
        return d;
      },
      py::arg("config_text"),
      "Limit-process parameters derived from a config file's text.");

  m.def(
      "des_marginal",
      [](const std::string& config_text, long n, double t, long replications,
         std::optional<std::uint64_t> seed, int workers) {
        ExperimentConfig cfg = config_from_text(config_text, seed);
        if (replications > 0) cfg.replications = replications;
        CollectOptions what;
        what.marginal_times = {t};
        std::vector<double> out;
        out.reserve(cfg.replications);
        const auto reps = simulate_many(cfg, n, 0, cfg.replications, what, workers);
        for (const auto& r : reps) out.push_back(r.marginals.front());
        return out;
      },
      py::arg("config_text"), py::arg("n"), py::arg("t"),
      py::arg("replications") = 0, py::arg("seed") = std::nullopt,
      py::arg("workers") = 1,
      "Scaled head-count marginal at grid time t from the simulation.");

  m.def(
      "sde_marginal",
      [](const std::string& config_text, double t, long paths,
         std::optional<std::uint64_t> seed, int workers) {
        ExperimentConfig cfg = config_from_text(config_text, seed);
        if (paths > 0) cfg.diffusion.paths = paths;
        const auto ps = diffusion_paths(cfg, cfg.diffusion.paths, workers);
        return marginal_at(ps, t);
      },
      py::arg("config_text"), py::arg("t"), py::arg("paths") = 0,
      py::arg("seed") = std::nullopt, py::arg("workers") = 1,
      "Limit-process marginal xi(t) sampled by Euler integration.");

  m.def(
      "euler_terminal",
      [](double sigma, double g, double beta, double xi0, double step, double horizon,
         long paths, std::uint64_t seed) {
        DiffusionSpec spec;
        spec.sigma = sigma;
        spec.g = g;
        spec.step = step;
        spec.horizon = horizon;
        DriftSample drift;
        drift.xi0 = xi0;
        drift.beta = beta;
        std::vector<double> out;
        out.reserve(paths);
        for (long i = 0; i < paths; ++i) {
          RngStream noise(derive_seed(seed, 0, i, StreamRole::sde_noise));
          out.push_back(euler_path(drift, spec, noise).xi.back());
        }
        return out;
      },
      py::arg("sigma"), py::arg("g"), py::arg("beta"), py::arg("xi0"), py::arg("step"),
      py::arg("horizon"), py::arg("paths"), py::arg("seed"),
      "Terminal values of the explicit-coefficient limit process.");

  m.attr("__version__") = "1.0.0";
}
