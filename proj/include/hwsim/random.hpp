#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hwsim {

// splitmix64 finalizer; good enough to decorrelate structured seed inputs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Every consumer of randomness in the toolkit draws from its own stream,
// keyed by (master seed, context, replication index, role). Streams are
// derived purely, so replications can run on any worker in any order and
// still see identical draws.
enum class StreamRole : std::uint64_t {
  environment = 1,
  initial = 2,
  arrivals = 3,
  service = 4,
  policy = 5,
  sde_init = 6,
  sde_zeta = 7,
  sde_noise = 8,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t context,
                                 std::uint64_t rep, StreamRole role) {
  std::uint64_t s = mix64(master ^ 0x243f6a8885a308d3ull);
  s = mix64(s ^ mix64(context + 0x13198a2e03707344ull));
  s = mix64(s ^ mix64(rep + 0xa4093822299f31d0ull));
  s = mix64(s ^ mix64(static_cast<std::uint64_t>(role) + 0x082efa98ec4e6c89ull));
  return s;
}

// mt19937_64 plus explicit transforms. The transforms are spelled out here
// (instead of std::*_distribution) so that a given seed yields the same
// sequence on every platform and compiler.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // uniform on {0, ..., n-1} without modulo bias
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  double exponential(double rate) {
    // -log(1-U) keeps the argument in (0,1], so no infinities
    return -std::log1p(-uniform01()) / rate;
  }

  // Box-Muller with a cached spare
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Standard normal cdf and its inverse (Acklam's rational approximation,
// relative error below 1.2e-9). The inverse is used for quantile coupling.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_quantile(double p);

}  // namespace hwsim
