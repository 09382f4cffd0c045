#include <cmath>
#include <vector>

#include "doctest.h"
#include "hwsim/random.hpp"

using namespace hwsim;

TEST_CASE("same seed reproduces the same draws") {
  RngStream a(12345), b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());
  RngStream c(12345);
  c.uniform01();
  CHECK(c.uniform01() != a.uniform01());  // streams advanced differently
}

TEST_CASE("derived seeds differ across context, rep, and role") {
  const auto s0 = derive_seed(7, 100, 0, StreamRole::arrivals);
  CHECK(s0 != derive_seed(7, 100, 1, StreamRole::arrivals));
  CHECK(s0 != derive_seed(7, 400, 0, StreamRole::arrivals));
  CHECK(s0 != derive_seed(7, 100, 0, StreamRole::service));
  CHECK(s0 != derive_seed(8, 100, 0, StreamRole::arrivals));
  CHECK(s0 == derive_seed(7, 100, 0, StreamRole::arrivals));
}

TEST_CASE("uniform01 lies in [0,1) and has the right mean") {
  RngStream r(42);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    acc += u;
  }
  CHECK(std::abs(acc / n - 0.5) < 0.003);
}

TEST_CASE("exponential moments") {
  RngStream r(43);
  const double rate = 2.5;
  double acc = 0.0, acc2 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double x = r.exponential(rate);
    REQUIRE(x >= 0.0);
    acc += x;
    acc2 += x * x;
  }
  const double mean = acc / n;
  const double second = acc2 / n;
  CHECK(std::abs(mean - 1.0 / rate) < 0.002);           // se ~ 6e-4
  CHECK(std::abs(second - 2.0 / (rate * rate)) < 0.01);  // E X^2 = 2/rate^2
}

TEST_CASE("normal moments and symmetry") {
  RngStream r(44);
  double acc = 0.0, acc2 = 0.0, acc3 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    acc += z;
    acc2 += z * z;
    acc3 += z * z * z;
  }
  CHECK(std::abs(acc / n) < 0.006);
  CHECK(std::abs(acc2 / n - 1.0) < 0.01);
  CHECK(std::abs(acc3 / n) < 0.03);
}

TEST_CASE("uniform_index is unbiased across a small range") {
  RngStream r(45);
  std::vector<long> counts(7, 0);
  const int n = 350000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
  for (long c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("normal quantile inverts the cdf") {
  // table values: Phi^{-1}(0.975) = 1.959964..., Phi^{-1}(0.5) = 0
  CHECK(std::abs(normal_quantile(0.975) - 1.9599639845400545) < 1e-9);
  CHECK(std::abs(normal_quantile(0.5)) < 1e-12);
  CHECK(std::abs(normal_quantile(0.2) + 0.8416212335729143) < 1e-9);
  for (double p : {1e-6, 0.01, 0.25, 0.5, 0.9, 0.999, 1.0 - 1e-9}) {
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-11);
  }
}
