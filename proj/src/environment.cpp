#include "hwsim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hwsim {

namespace {

constexpr double kProbTol = 1e-9;

double phi(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }

// mean and second moment of one continuous component
void component_moments(const TildeComponent& c, double& mean, double& second, double& inf) {
  if (c.kind == TildeComponent::Kind::Uniform) {
    mean = 0.5 * (c.a + c.b);
    second = (c.a * c.a + c.a * c.b + c.b * c.b) / 3.0;
    inf = c.a;
    return;
  }
  const double alpha = (c.lo - c.mean) / c.sd;
  const double beta = (c.hi - c.mean) / c.sd;
  const double z = normal_cdf(beta) - normal_cdf(alpha);
  const double num = phi(alpha) - phi(beta);
  mean = c.mean + c.sd * num / z;
  const double var =
      c.sd * c.sd *
      (1.0 + (alpha * phi(alpha) - beta * phi(beta)) / z - (num / z) * (num / z));
  second = var + mean * mean;
  inf = c.lo;
}

double sample_component(const TildeComponent& c, RngStream& rng) {
  if (c.kind == TildeComponent::Kind::Uniform) return rng.uniform(c.a, c.b);
  // rejection against the truncation window; acceptance rate is the window mass
  for (;;) {
    const double x = rng.normal(c.mean, c.sd);
    if (x >= c.lo && x <= c.hi) return x;
  }
}

}  // namespace

void RateLawSpec::validate() const {
  if (uses_atoms()) {
    if (atoms.empty()) throw ConfigError("rate law: no atoms given");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (a.prob <= 0.0) throw ConfigError("rate law: atom probability must be positive");
      if (a.tilde <= 0.0) throw ConfigError("rate law: base rate must be positive");
      total += a.prob;
    }
    if (std::abs(total - 1.0) > kProbTol)
      throw ConfigError("rate law: atom probabilities sum to " + std::to_string(total));
  } else {
    if (kind == RateLawKind::Table)
      throw ConfigError("rate law: table layouts need a finite atom list");
    double wtot = 0.0;
    for (const auto& c : components) {
      if (c.weight <= 0.0) throw ConfigError("rate law: component weight must be positive");
      if (c.kind == TildeComponent::Kind::Uniform) {
        if (!(c.a < c.b)) throw ConfigError("rate law: uniform component needs a < b");
        if (c.a <= 0.0) throw ConfigError("rate law: uniform support must be positive");
      } else {
        if (!(c.lo < c.hi))
          throw ConfigError("rate law: truncated normal needs lo < hi");
        if (c.lo <= 0.0)
          throw ConfigError("rate law: truncation window must be positive");
        if (c.sd <= 0.0) throw ConfigError("rate law: sd must be positive");
      }
      wtot += c.weight;
    }
    if (std::abs(wtot - 1.0) > kProbTol)
      throw ConfigError("rate law: component weights sum to " + std::to_string(wtot));
    double ptot = 0.0;
    if (hat_atoms.empty()) throw ConfigError("rate law: perturbation atoms missing");
    for (const auto& h : hat_atoms) {
      if (h.prob <= 0.0)
        throw ConfigError("rate law: perturbation atom probability must be positive");
      ptot += h.prob;
    }
    if (std::abs(ptot - 1.0) > kProbTol)
      throw ConfigError("rate law: perturbation probabilities sum to " +
                        std::to_string(ptot));
  }
}

double RateLawSpec::max_abs_hat() const {
  double m = 0.0;
  if (uses_atoms()) {
    for (const auto& a : atoms) m = std::max(m, std::abs(a.hat));
  } else {
    for (const auto& h : hat_atoms) m = std::max(m, std::abs(h.value));
  }
  return m;
}

LimitParams derive_limit_params(const RateLawSpec& spec, double lambda_hat, double c_u_sq) {
  spec.validate();
  LimitParams p;
  double first = 0.0, second = 0.0, hat_mean = 0.0, inf = 0.0;
  if (spec.uses_atoms()) {
    inf = spec.atoms.front().tilde;
    for (const auto& a : spec.atoms) {
      first += a.prob * a.tilde;
      second += a.prob * a.tilde * a.tilde;
      hat_mean += a.prob * a.hat;
      inf = std::min(inf, a.tilde);
    }
  } else {
    inf = 0.0;
    bool have_inf = false;
    for (const auto& c : spec.components) {
      double m, s, lo;
      component_moments(c, m, s, lo);
      first += c.weight * m;
      second += c.weight * s;
      if (!have_inf || lo < inf) inf = lo;
      have_inf = true;
    }
    for (const auto& h : spec.hat_atoms) hat_mean += h.prob * h.value;
  }
  p.mu = first;
  p.mu_hat_mean = hat_mean;
  p.var_tilde = second - first * first;
  if (p.var_tilde < 0.0) p.var_tilde = 0.0;  // guard fp cancellation
  p.gamma = second / first;
  p.mu_min = inf;
  p.lambda_hat = lambda_hat;
  p.c_u_sq = c_u_sq;
  p.sigma_sq = p.mu * c_u_sq + p.mu;
  p.zeta_var = spec.kind == RateLawKind::Iid ? p.var_tilde : 0.0;
  return p;
}

void EnvironmentRealization::sort_by_rate() {
  std::vector<std::size_t> idx(rates.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return rates[i] < rates[j]; });
  EnvironmentRealization out = *this;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    rates[k] = out.rates[idx[k]];
    tilde_rates[k] = out.tilde_rates[idx[k]];
    hat_rates[k] = out.hat_rates[idx[k]];
  }
}

EnvironmentRealization realize_environment(const RateLawSpec& spec, long n, double nu,
                                           RngStream& rng) {
  spec.validate();
  if (n < 1) throw ConfigError("environment: n must be at least 1");
  EnvironmentRealization env;
  env.n = n;

  if (spec.kind == RateLawKind::Table) {
    if (nu != 0.0)
      throw ConfigError("environment: table layouts require a zero count perturbation");
    env.num_servers = n;
    const std::size_t L = spec.atoms.size();
    std::vector<long> counts(L);
    long assigned = 0;
    for (std::size_t l = 0; l < L; ++l) {
      counts[l] = static_cast<long>(std::floor(static_cast<double>(n) * spec.atoms[l].prob));
      assigned += counts[l];
    }
    long rem = n - assigned;
    for (std::size_t l = 0; rem > 0; l = (l + 1) % L, --rem) counts[l] += 1;
    env.rates.reserve(n);
    env.tilde_rates.reserve(n);
    env.hat_rates.reserve(n);
    const double root = std::sqrt(static_cast<double>(n));
    for (std::size_t l = 0; l < L; ++l) {
      for (long i = 0; i < counts[l]; ++i) {
        const double tilde = spec.atoms[l].tilde;
        const double hat = spec.atoms[l].hat;
        double r = tilde + hat / root;
        if (r < 0.0) {
          r = 0.0;
          ++env.clamp_count;
        }
        env.rates.push_back(r);
        env.tilde_rates.push_back(tilde);
        env.hat_rates.push_back(hat);
      }
    }
    return env;
  }

  const double root = std::sqrt(static_cast<double>(n));
  long long N = n + static_cast<long long>(std::llround(root * nu));
  N = std::clamp<long long>(N, 1, 2 * static_cast<long long>(n));
  env.num_servers = static_cast<long>(N);
  env.rates.reserve(env.num_servers);
  env.tilde_rates.reserve(env.num_servers);
  env.hat_rates.reserve(env.num_servers);

  // cumulative weights for the component / atom pickers
  std::vector<double> cum;
  if (spec.uses_atoms()) {
    cum.reserve(spec.atoms.size());
    double c = 0.0;
    for (const auto& a : spec.atoms) cum.push_back(c += a.prob);
  } else {
    cum.reserve(spec.components.size());
    double c = 0.0;
    for (const auto& comp : spec.components) cum.push_back(c += comp.weight);
  }
  std::vector<double> hat_cum;
  if (!spec.uses_atoms()) {
    double c = 0.0;
    for (const auto& h : spec.hat_atoms) hat_cum.push_back(c += h.prob);
  }
  auto pick = [](const std::vector<double>& cw, double u) {
    std::size_t i = 0;
    while (i + 1 < cw.size() && u >= cw[i]) ++i;
    return i;
  };

  for (long k = 0; k < env.num_servers; ++k) {
    double tilde, hat;
    if (spec.uses_atoms()) {
      const auto& a = spec.atoms[pick(cum, rng.uniform01())];
      tilde = a.tilde;
      hat = a.hat;
    } else {
      tilde = sample_component(spec.components[pick(cum, rng.uniform01())], rng);
      hat = spec.hat_atoms[pick(hat_cum, rng.uniform01())].value;
    }
    double r = tilde + hat / root;
    if (r < 0.0) {
      r = 0.0;
      ++env.clamp_count;
    }
    env.rates.push_back(r);
    env.tilde_rates.push_back(tilde);
    env.hat_rates.push_back(hat);
  }
  return env;
}

void ScalarLaw::validate(const std::string& what) const {
  switch (kind) {
    case Kind::Point:
      return;
    case Kind::Atoms: {
      if (atoms.empty()) throw ConfigError(what + ": empty atom list");
      double total = 0.0;
      for (const auto& a : atoms) {
        if (a.prob <= 0.0) throw ConfigError(what + ": atom probability must be positive");
        total += a.prob;
      }
      if (std::abs(total - 1.0) > kProbTol)
        throw ConfigError(what + ": probabilities sum to " + std::to_string(total));
      return;
    }
    case Kind::Normal:
      if (sd < 0.0) throw ConfigError(what + ": sd must be nonnegative");
      return;
  }
}

double ScalarLaw::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::Point:
      return value;
    case Kind::Atoms: {
      const double u = rng.uniform01();
      double c = 0.0;
      for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        c += atoms[i].prob;
        if (u < c) return atoms[i].value;
      }
      return atoms.back().value;
    }
    case Kind::Normal:
      return rng.normal(mean, sd);
  }
  return value;
}

double ScalarLaw::quantile(double u) const {
  switch (kind) {
    case Kind::Point:
      return value;
    case Kind::Atoms: {
      // atoms in listed order; quantile walks the same cumulative as sample()
      double c = 0.0;
      for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        c += atoms[i].prob;
        if (u < c) return atoms[i].value;
      }
      return atoms.back().value;
    }
    case Kind::Normal:
      return sd == 0.0 ? mean : mean + sd * normal_quantile(u);
  }
  return value;
}

double ScalarLaw::mean_value() const {
  switch (kind) {
    case Kind::Point:
      return value;
    case Kind::Atoms: {
      double m = 0.0;
      for (const auto& a : atoms) m += a.prob * a.value;
      return m;
    }
    case Kind::Normal:
      return mean;
  }
  return value;
}

InitialDraw sample_xi0_nu(const InitialStateSpec& spec, RngStream& rng) {
  InitialDraw d;
  if (spec.independent) {
    d.xi0 = spec.xi0_law.sample(rng);
    d.nu = spec.nu_law.sample(rng);
  } else {
    const double u = rng.uniform01();
    d.xi0 = spec.xi0_law.quantile(u);
    d.nu = spec.nu_law.quantile(u);
  }
  return d;
}

InitialState sample_initial_state(const InitialStateSpec& spec,
                                  const EnvironmentRealization& env, double xi0,
                                  RngStream& rng) {
  InitialState st;
  const long N = env.num_servers;
  const double root = std::sqrt(static_cast<double>(env.n));
  long long x0 = N + static_cast<long long>(std::llround(root * xi0));
  if (x0 < 0) {
    x0 = 0;
    st.clamped = true;
  }
  st.x0 = x0;
  const long long busy = std::min<long long>(x0, N);
  st.q0 = x0 - busy;
  st.busy0.assign(N, 0);
  if (busy == N) {
    std::fill(st.busy0.begin(), st.busy0.end(), std::uint8_t{1});
    return st;
  }
  if (spec.placement == IdlePlacement::FastestBusy) {
    // busy block = top [busy] indices; callers sort servers by rate first,
    // which makes this the fastest-servers-busy layout
    for (long long k = N - busy; k < N; ++k) st.busy0[k] = 1;
    return st;
  }
  // uniform busy subset via partial Fisher-Yates on the index array
  std::vector<long> idx(N);
  std::iota(idx.begin(), idx.end(), 0L);
  for (long long i = 0; i < busy; ++i) {
    const auto j = i + static_cast<long long>(rng.uniform_index(N - i));
    std::swap(idx[i], idx[j]);
    st.busy0[idx[i]] = 1;
  }
  return st;
}

}  // namespace hwsim
