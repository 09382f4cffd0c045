#include "hwsim/arrivals.hpp"

#include <cmath>
#include <string>

namespace hwsim {

namespace {
constexpr double kTol = 1e-12;
}

InterarrivalLaw make_interarrival_law(ArrivalFamily family, double c_u_sq,
                                      int erlang_shape) {
  if (c_u_sq < 0.0) throw ConfigError("interarrival: squared CV must be nonnegative");
  InterarrivalLaw law;
  law.family = family;
  law.c_u_sq = c_u_sq;
  switch (family) {
    case ArrivalFamily::Deterministic:
      if (c_u_sq > kTol)
        throw ConfigError("interarrival: deterministic family requires scv = 0");
      law.c_u_sq = 0.0;
      return law;
    case ArrivalFamily::Exponential:
      if (std::abs(c_u_sq - 1.0) > kTol)
        throw ConfigError("interarrival: exponential family requires scv = 1");
      law.c_u_sq = 1.0;
      return law;
    case ArrivalFamily::Erlang: {
      if (erlang_shape < 1)
        throw ConfigError("interarrival: erlang family needs a positive shape");
      if (std::abs(c_u_sq - 1.0 / erlang_shape) > kTol)
        throw ConfigError("interarrival: erlang(" + std::to_string(erlang_shape) +
                          ") has scv = 1/" + std::to_string(erlang_shape));
      law.erlang_shape = erlang_shape;
      return law;
    }
    case ArrivalFamily::HyperExp2: {
      // balanced-means two-phase mixture: p/r1 = (1-p)/r2 = 1/2
      if (c_u_sq < 1.0 - kTol)
        throw ConfigError("interarrival: two-phase hyperexponential requires scv >= 1");
      const double s = std::sqrt((c_u_sq - 1.0) / (c_u_sq + 1.0));
      law.hyper_p = 0.5 * (1.0 + s);
      law.hyper_r1 = 2.0 * law.hyper_p;
      law.hyper_r2 = 2.0 * (1.0 - law.hyper_p);
      return law;
    }
    case ArrivalFamily::Uniform: {
      // [1-w, 1+w] with w = sqrt(3*c2); nonnegative support caps c2 at 1/3
      if (c_u_sq > 1.0 / 3.0 + kTol)
        throw ConfigError("interarrival: uniform family requires scv <= 1/3");
      const double w = std::sqrt(3.0 * c_u_sq);
      law.uni_a = 1.0 - w;
      law.uni_b = 1.0 + w;
      return law;
    }
    case ArrivalFamily::Lognormal: {
      if (c_u_sq <= 0.0)
        throw ConfigError("interarrival: lognormal family requires scv > 0");
      // mean 1 and scv c2 pin the log-scale parameters exactly
      law.log_s = std::sqrt(std::log1p(c_u_sq));
      law.log_m = -0.5 * law.log_s * law.log_s;
      return law;
    }
  }
  throw ConfigError("interarrival: unknown family");
}

double InterarrivalLaw::sample(RngStream& rng) const {
  switch (family) {
    case ArrivalFamily::Deterministic:
      return 1.0;
    case ArrivalFamily::Exponential:
      return rng.exponential(1.0);
    case ArrivalFamily::Erlang: {
      double s = 0.0;
      const double rate = static_cast<double>(erlang_shape);
      for (int i = 0; i < erlang_shape; ++i) s += rng.exponential(rate);
      return s;
    }
    case ArrivalFamily::HyperExp2:
      return rng.uniform01() < hyper_p ? rng.exponential(hyper_r1)
                                       : rng.exponential(hyper_r2);
    case ArrivalFamily::Uniform:
      return rng.uniform(uni_a, uni_b);
    case ArrivalFamily::Lognormal:
      return std::exp(rng.normal(log_m, log_s));
  }
  return 1.0;
}

RenewalArrivals::RenewalArrivals(const InterarrivalLaw& law, double lambda_n,
                                 RngStream rng)
    : law_(law), lambda_n_(lambda_n), rng_(rng) {
  if (!(lambda_n > 0.0)) throw ConfigError("arrivals: rate must be positive");
}

double RenewalArrivals::next() {
  clock_ += law_.sample(rng_) / lambda_n_;
  return clock_;
}

double arrival_rate(long n, double mu, double lambda_hat) {
  return static_cast<double>(n) * mu + std::sqrt(static_cast<double>(n)) * lambda_hat;
}

}  // namespace hwsim
