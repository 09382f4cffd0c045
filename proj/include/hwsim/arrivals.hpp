#pragma once

#include <limits>
#include <vector>

#include "hwsim/environment.hpp"
#include "hwsim/random.hpp"

namespace hwsim {

// Interarrival distribution with mean exactly 1; the renewal stream rescales
// it by the arrival rate. Each family is calibrated in closed form to hit a
// requested squared coefficient of variation.
enum class ArrivalFamily {
  Deterministic,
  Exponential,
  Erlang,
  HyperExp2,
  Uniform,
  Lognormal,
};

struct InterarrivalLaw {
  ArrivalFamily family = ArrivalFamily::Exponential;
  double c_u_sq = 1.0;

  int erlang_shape = 1;
  double hyper_p = 0.0, hyper_r1 = 0.0, hyper_r2 = 0.0;  // balanced-means mix
  double uni_a = 0.0, uni_b = 0.0;
  double log_m = 0.0, log_s = 0.0;  // parameters of log X

  double sample(RngStream& rng) const;
  double mean() const { return 1.0; }
  double variance() const { return c_u_sq; }
};

// Solves the family parameters for the requested c2. Throws ConfigError when
// the family cannot attain it (with the feasible range in the message).
// erlang_shape is only consulted for the erlang family and must satisfy
// c2 == 1/shape.
InterarrivalLaw make_interarrival_law(ArrivalFamily family, double c_u_sq,
                                      int erlang_shape = 0);

class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  // absolute epoch of the next arrival; +inf when exhausted
  virtual double next() = 0;
};

// Renewal stream at rate lambda_n: gaps are iid law samples divided by
// lambda_n, and the first arrival sits a full gap after time zero.
class RenewalArrivals final : public ArrivalSource {
 public:
  RenewalArrivals(const InterarrivalLaw& law, double lambda_n, RngStream rng);
  double next() override;
  double rate() const { return lambda_n_; }

 private:
  InterarrivalLaw law_;
  double lambda_n_;
  RngStream rng_;
  double clock_ = 0.0;
};

// Fixed epochs, for deterministic engine tests.
class ScriptedArrivals final : public ArrivalSource {
 public:
  explicit ScriptedArrivals(std::vector<double> epochs) : epochs_(std::move(epochs)) {}
  double next() override {
    if (i_ >= epochs_.size()) return std::numeric_limits<double>::infinity();
    return epochs_[i_++];
  }

 private:
  std::vector<double> epochs_;
  std::size_t i_ = 0;
};

// n-th system arrival rate n*mu + sqrt(n)*lambda_hat (critical load).
double arrival_rate(long n, double mu, double lambda_hat);

}  // namespace hwsim
