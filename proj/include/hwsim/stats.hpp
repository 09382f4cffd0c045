#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hwsim {

// Two-sample Kolmogorov-Smirnov: sup-distance between empirical cdfs plus
// the asymptotic p-value at the standard effective size n1*n2/(n1+n2).
struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Kolmogorov distribution survival function Q(x) = 2*sum (-1)^(j-1) exp(-2 j^2 x^2).
double kolmogorov_sf(double x);

// First Wasserstein distance between empirical laws. Equal sizes pair order
// statistics directly; unequal sizes compare quantiles at (i+1/2)/m for
// m = min(n1, n2).
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased; 0 when count < 2
  double ci_half = 0.0;    // 1.96 * sqrt(variance/count)
};

SummaryStats summarize(std::span<const double> values);

// One row of a convergence study: a finite-n sample against a fixed
// reference sample.
struct ConvergenceRow {
  long n = 0;
  std::size_t reps = 0;
  double ks_d = 0.0;
  double ks_p = 0.0;
  double w1 = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_ci_half = 0.0;
};

std::vector<ConvergenceRow> convergence_table(
    const std::vector<std::pair<long, std::vector<double>>>& ladder,
    std::span<const double> reference);

}  // namespace hwsim
