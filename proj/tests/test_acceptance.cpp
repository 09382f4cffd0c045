// Acceptance battery: one line per criterion, exit 0 only if all pass.
// Thresholds are frozen here on purpose; loosening one is a code change
// that should show up in review, not a knob.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hwsim/commands.hpp"
#include "hwsim/config.hpp"
#include "hwsim/diffusion.hpp"
#include "hwsim/experiment.hpp"
#include "hwsim/random.hpp"
#include "hwsim/stats.hpp"

namespace fs = std::filesystem;
using namespace hwsim;

namespace {

int g_failed = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %d (%s): %s  %s\n", idx, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::vector<double> des_marginal(const ExperimentConfig& cfg, long n, double t,
                                 long reps, std::uint64_t rep0 = 0,
                                 const CollectOptions* extra = nullptr) {
  CollectOptions what;
  if (extra) what = *extra;
  what.marginal_times = {t};
  const auto outs = simulate_many(cfg, n, rep0, reps, what, 1);
  std::vector<double> xs(outs.size());
  for (std::size_t i = 0; i < outs.size(); ++i) xs[i] = outs[i].marginals[0];
  return xs;
}

std::vector<double> sde_marginal(const ExperimentConfig& cfg, long paths, double t) {
  const auto ps = diffusion_paths(cfg, paths, 1);
  return marginal_at(ps, t);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Criterion-3 sample pair, reused by the step-halving check in criterion 8.
struct Crit3Stash {
  bool ready = false;
  ExperimentConfig cfg;
  std::vector<double> des;
  double ks_d = 0.0;
};
Crit3Stash g_crit3;

// 1. Conservation laws hold exactly at every event, for both routing policies
//    and both service mechanisms across the whole ladder.
void criterion1() {
  const char* base =
      "[rates]\natoms = 0.5 0.0 0.5 : 1.5 0.0 0.5\n"
      "[initial]\nxi0 = normal 0 1\nnu = normal 0 0.5\n"
      "[experiment]\nladder = 25 100 400\nhorizon = 1.0\nseed = 11\n";
  long long violations = 0;
  long long events = 0;
  bool ok = true;
  std::string first;
  for (const char* pol : {"p1", "p2"}) {
    for (const char* mech : {"per_server", "pooled"}) {
      auto cfg = parse_config_text(std::string(base) + "policy = " + pol +
                                   "\nmechanism = " + mech + "\n");
      CollectOptions what;
      what.strict_invariants = true;
      what.marginal_times = {1.0};
      for (long n : cfg.ladder) {
        const auto outs = simulate_many(cfg, n, 0, 20, what, 1);
        for (const auto& o : outs) {
          violations += o.violations;
          events += o.events;
        }
      }
      if (violations > 0 && ok) {
        ok = false;
        first = std::string(pol) + "/" + mech;
      }
    }
  }
  std::string detail = "violations = " + std::to_string(violations) + " over " +
                       std::to_string(events) + " events, 4 engine variants (limit 0)";
  if (!ok) detail += ", first at " + first;
  report(1, "exact conservation invariants", violations == 0, detail);
}

// 2. Per-server and pooled engines produce the same scaled headcount law.
void criterion2() {
  auto cfg = parse_config_text(
      "[rates]\natoms = 0.5 0.0 0.5 : 1.5 0.0 0.5\n"
      "[experiment]\nladder = 100\nhorizon = 1.0\nseed = 22\n");
  cfg.mechanism = ServiceMode::PerServer;
  const auto a = des_marginal(cfg, 100, 1.0, 2000, 0);
  cfg.mechanism = ServiceMode::Pooled;
  const auto b = des_marginal(cfg, 100, 1.0, 2000, 2000);  // disjoint stream block
  const auto ks = ks_two_sample(a, b);
  report(2, "pooled engine equivalence", ks.p_value > 0.01,
         "ks d = " + fmt(ks.d) + ", p = " + fmt(ks.p_value) + " (need p > 0.01)");
}

// 3. Degenerate environment: scaled headcount at t=2 matches the limit
//    diffusion with g = 1, sigma^2 = 2, beta = -0.5.
void criterion3() {
  auto cfg = parse_config_text(
      "[rates]\natoms = 1.0 0.0 1.0\n"
      "[arrivals]\nfamily = exponential\nlambda_hat = -0.5\n"
      "[experiment]\nladder = 400\nhorizon = 2.0\nreport_times = 2.0\nseed = 33\n"
      "[diffusion]\nstep = 0.001\nhorizon = 2.0\n");
  const auto des = des_marginal(cfg, 400, 2.0, 4000);
  const auto sde = sde_marginal(cfg, 4000, 2.0);
  const auto ks = ks_two_sample(des, sde);
  g_crit3 = {true, cfg, des, ks.d};
  report(3, "critically loaded square-root scaling", ks.d <= 0.05,
         "ks d = " + fmt(ks.d) + " at t=2, n=400 (limit 0.05)");
}

// 4. Random service rates, longest-idle routing: convergence along the ladder
//    to the diffusion with random drift and g = gamma.
void criterion4() {
  auto cfg = parse_config_text(
      "[rates]\natoms = 0.5 0.0 0.5 : 1.5 0.0 0.5\n"
      "[experiment]\nladder = 25 100 400\nhorizon = 1.0\nseed = 44\n"
      "[diffusion]\nstep = 0.001\nhorizon = 1.0\ndrift = gamma\n");
  const auto sde = sde_marginal(cfg, 4000, 1.0);
  std::vector<double> ds;
  for (long n : cfg.ladder)
    ds.push_back(ks_two_sample(des_marginal(cfg, n, 1.0, 4000), sde).d);
  const bool trend = ds[1] <= ds[0] + 0.01 && ds[2] <= ds[1] + 0.01;
  const bool tail = ds[2] <= 0.06;
  report(4, "random-rate limit, longest-idle policy", trend && tail,
         "ks d = {" + fmt(ds[0]) + ", " + fmt(ds[1]) + ", " + fmt(ds[2]) +
             "} over n = {25, 100, 400} (nonincreasing +-0.01, final <= 0.06)");
}

// 5. Fastest-server-first: g = mu_min limit plus vanishing fast-idle mass.
void criterion5() {
  auto cfg = parse_config_text(
      "[rates]\natoms = 0.5 0.0 0.5 : 1.5 0.0 0.5\n"
      "[experiment]\nladder = 25 400\npolicy = p2\nhorizon = 1.0\nseed = 55\n"
      "[diffusion]\nstep = 0.001\nhorizon = 1.0\ndrift = mu_min\n");
  CollectOptions what;
  what.fast_tilde_min = 1.0;  // counts idle servers from the 1.5 atom
  what.marginal_times = {1.0};
  const auto o25 = simulate_many(cfg, 25, 0, 4000, what, 1);
  const auto o400 = simulate_many(cfg, 400, 0, 4000, what, 1);
  std::vector<double> sup25(o25.size()), sup400(o400.size()), des400(o400.size());
  for (std::size_t i = 0; i < o25.size(); ++i) sup25[i] = o25[i].fast_idle_sup;
  for (std::size_t i = 0; i < o400.size(); ++i) {
    sup400[i] = o400[i].fast_idle_sup;
    des400[i] = o400[i].marginals[0];
  }
  const auto sde = sde_marginal(cfg, 4000, 1.0);
  const auto ks = ks_two_sample(des400, sde);
  const double m25 = mean_of(sup25);
  const double m400 = mean_of(sup400);
  const bool proxy = m400 < 0.5 * m25;
  report(5, "fastest-first limit and fast-idle decay", ks.d <= 0.07 && proxy,
         "ks d = " + fmt(ks.d) + " (limit 0.07); scaled fast-idle sup mean " +
             fmt(m400) + " at n=400 vs " + fmt(m25) + " at n=25 (need < 0.5x)");
}

// 6. Idle-period fairness: the spread of last-idle-period lengths collapses
//    and the scaled longest one matches mu^{-1} xi(s)^-.
void criterion6() {
  auto cfg = parse_config_text(
      "[rates]\natoms = 1.0 0.0 1.0\n"
      "[arrivals]\nlambda_hat = -1.0\n"
      "[experiment]\nladder = 25 400\nhorizon = 1.5\nreport_times = 1.0\nseed = 66\n"
      "[diffusion]\nstep = 0.001\nhorizon = 1.0\n"
      "[fairness]\ns = 1.0\nc = 1.0\n");
  CollectOptions what;
  what.fairness = true;
  what.fairness_s = 1.0;
  what.fairness_c = 1.0;
  auto gather = [&](long n, std::vector<double>* gaps, std::vector<double>* sups) {
    const auto outs = simulate_many(cfg, n, 0, 2000, what, 1);
    for (const auto& o : outs) {
      if (!o.fairness) continue;
      gaps->push_back(o.fairness->sup_scaled - o.fairness->inf_scaled);
      sups->push_back(o.fairness->sup_scaled);
    }
    return static_cast<double>(gaps->size()) / static_cast<double>(outs.size());
  };
  std::vector<double> gap25, sup25v, gap400, sup400v;
  const double avail25 = gather(25, &gap25, &sup25v);
  const double avail400 = gather(400, &gap400, &sup400v);
  const auto ps = diffusion_paths(cfg, 2000, 1);
  auto xi1 = marginal_at(ps, 1.0);
  for (auto& v : xi1) v = std::max(-v, 0.0);  // mu = 1
  const auto ks = ks_two_sample(sup400v, xi1);
  const double m25 = mean_of(gap25);
  const double m400 = mean_of(gap400);
  const bool ok = avail25 > 0.9 && avail400 > 0.9 && m400 < 0.5 * m25 && ks.d <= 0.10;
  report(6, "idle-period fairness", ok,
         "gap mean " + fmt(m400) + " at n=400 vs " + fmt(m25) +
             " at n=25 (need < 0.5x); ks(sup, limit idleness) = " + fmt(ks.d) +
             " (limit 0.10); sampled fraction " + fmt(avail25) + "/" + fmt(avail400));
}

// 7. Fixed rate table: deterministic drift, exact per-atom counts.
void criterion7() {
  auto cfg = parse_config_text(
      "[rates]\nkind = table\natoms = 0.5 0.3 0.5 : 1.5 -0.1 0.5\n"
      "[experiment]\nladder = 400\nhorizon = 1.0\nseed = 77\n"
      "[diffusion]\nstep = 0.001\nhorizon = 1.0\ndrift = gamma\n");
  bool counts_ok = true;
  long bad_n = 0;
  RngStream rng(derive_seed(77, 0, 0, StreamRole::environment));
  for (long n = 1; n <= 500 && counts_ok; ++n) {
    const auto env = realize_environment(cfg.rates, n, 0.0, rng);
    if (env.num_servers != n) {
      counts_ok = false;
      bad_n = n;
      break;
    }
    for (std::size_t l = 0; l < cfg.rates.atoms.size(); ++l) {
      long count = 0;
      for (long k = 0; k < n; ++k)
        if (env.tilde_rates[static_cast<std::size_t>(k)] == cfg.rates.atoms[l].tilde &&
            env.hat_rates[static_cast<std::size_t>(k)] == cfg.rates.atoms[l].hat)
          ++count;
      const double gap = std::abs(static_cast<double>(count) -
                                  static_cast<double>(n) * cfg.rates.atoms[l].prob);
      if (gap > static_cast<double>(cfg.rates.atoms.size())) {
        counts_ok = false;
        bad_n = n;
      }
    }
  }
  const auto des = des_marginal(cfg, 400, 1.0, 4000);
  const auto sde = sde_marginal(cfg, 4000, 1.0);
  const auto ks = ks_two_sample(des, sde);
  report(7, "deterministic rate table", counts_ok && ks.d <= 0.06,
         "ks d = " + fmt(ks.d) + " (limit 0.06); atom counts within " +
             std::to_string(cfg.rates.atoms.size()) + " of n*p for n <= 500" +
             (counts_ok ? "" : " FAILED at n=" + std::to_string(bad_n)));
}

// 8. Integrator oracles: closed-form pull-back, exact Gaussian when g=0, and
//    step-halving stability of the criterion-3 comparison.
void criterion8() {
  // (a) noiseless exponential relaxation
  DiffusionSpec spec;
  spec.sigma = 0.0;
  spec.g = 1.0;
  spec.step = 1e-3;
  spec.horizon = 1.0;
  DriftSample drift;
  drift.xi0 = -1.0;
  RngStream noise(derive_seed(88, 0, 0, StreamRole::sde_noise));
  const auto path = euler_path(drift, spec, noise);
  const double err_a = std::abs(path.xi.back() + std::exp(-1.0));
  const bool a_ok = err_a <= 1e-3;

  // (b) g = 0 keeps the scheme exactly Gaussian
  DiffusionSpec flat;
  flat.sigma = 1.5;
  flat.g = 0.0;
  flat.step = 1e-3;
  flat.horizon = 1.0;
  DriftSample d2;
  d2.xi0 = -0.4;
  d2.beta = 0.7;
  const long paths = 4000;
  std::vector<double> ends(paths);
  for (long p = 0; p < paths; ++p) {
    RngStream z(derive_seed(88, 0, static_cast<std::uint64_t>(p), StreamRole::sde_noise));
    ends[static_cast<std::size_t>(p)] = euler_path(d2, flat, z).xi.back();
  }
  const auto st = summarize(ends);
  const double se_mean = flat.sigma / std::sqrt(static_cast<double>(paths));
  const double se_var =
      flat.sigma * flat.sigma * std::sqrt(2.0 / static_cast<double>(paths - 1));
  const double mean_err = std::abs(st.mean - (d2.xi0 + d2.beta));
  const double var_err = std::abs(st.variance - flat.sigma * flat.sigma);
  const bool b_ok = mean_err <= 3 * se_mean && var_err <= 3 * se_var;

  // (c) halving the step moves the criterion-3 distance by little
  bool c_ok = false;
  double shift = std::nan("");
  if (g_crit3.ready) {
    auto cfg = g_crit3.cfg;
    cfg.diffusion.step = 5e-4;
    const auto sde_half = sde_marginal(cfg, 4000, 2.0);
    const double d_half = ks_two_sample(g_crit3.des, sde_half).d;
    shift = std::abs(d_half - g_crit3.ks_d);
    c_ok = shift <= 0.01;
  }
  report(8, "integrator oracles", a_ok && b_ok && c_ok,
         "|xi(1) + e^-1| = " + fmt(err_a) + " (limit 1e-3); g=0 mean/var err = " +
             fmt(mean_err) + "/" + fmt(var_err) + " (limits " + fmt(3 * se_mean) +
             "/" + fmt(3 * se_var) + "); step-halving ks shift = " + fmt(shift) +
             " (limit 0.01)");
}

// 9. Artifacts are byte-identical across reruns and worker counts.
void criterion9() {
  const fs::path root = fs::temp_directory_path() / "hwsim_accept9";
  std::error_code ec;
  fs::remove_all(root, ec);
  auto make_cfg = [&](const std::string& sub) {
    auto cfg = parse_config_text(
        "[rates]\natoms = 0.5 0.0 0.5 : 1.5 0.0 0.5\n"
        "[initial]\nxi0 = normal 0 1\n"
        "[experiment]\nladder = 25\nreplications = 100\nhorizon = 0.5\n"
        "sample_dt = 0.05\nreport_times = 0.25 0.5\nseed = 99\n"
        "[diffusion]\nstep = 0.001\nhorizon = 0.5\npaths = 200\n");
    cfg.out_dir = (root / sub).string();
    return cfg;
  };
  std::ostringstream log;
  struct Run {
    std::string dir;
    int workers;
  };
  const std::vector<Run> runs = {{"r1", 1}, {"r2", 3}, {"r3", 1}};
  for (const auto& r : runs) {
    const auto cfg = make_cfg(r.dir);
    cmd_simulate(cfg, r.workers, log);
    cmd_diffusion(cfg, r.workers, log);
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool ok = true;
  std::string bad;
  long files = 0;
  for (const auto& entry : fs::directory_iterator(root / "r1")) {
    ++files;
    const auto name = entry.path().filename();
    const std::string ref = slurp(entry.path());
    for (const char* other : {"r2", "r3"}) {
      const fs::path twin = root / other / name;
      if (!fs::exists(twin) || slurp(twin) != ref) {
        ok = false;
        if (bad.empty()) bad = (fs::path(other) / name).string();
      }
    }
  }
  if (files == 0) {
    ok = false;
    bad = "no artifacts written";
  }
  report(9, "deterministic artifacts", ok,
         std::to_string(files) + " files compared across reruns and workers 1/3" +
             (ok ? "" : ", first mismatch: " + bad));
  fs::remove_all(root, ec);
}

}  // namespace

int main() {
  std::printf("acceptance battery: 9 criteria\n");
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failed == 0) {
    std::printf("acceptance: all criteria passed\n");
    return kExitOk;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failed);
  return kExitInvariant;
}
