#include "hwsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hwsim {

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::size_t n1 = sa.size(), n2 = sb.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n1 && j < n2) {
    const double v = std::min(sa[i], sb[j]);
    while (i < n1 && sa[i] == v) ++i;
    while (j < n2 && sb[j] == v) ++j;
    const double f1 = static_cast<double>(i) / n1;
    const double f2 = static_cast<double>(j) / n2;
    d = std::max(d, std::abs(f1 - f2));
  }
  // the tail beyond the shorter sample contributes at the crossover above
  KsResult r;
  r.d = d;
  const double ne = static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
  r.p_value = kolmogorov_sf(std::sqrt(ne) * d);
  return r;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const std::size_t m = std::min(sa.size(), sb.size());
  double acc = 0.0;
  if (sa.size() == sb.size()) {
    for (std::size_t i = 0; i < m; ++i) acc += std::abs(sa[i] - sb[i]);
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      const double va = sa[std::min(sa.size() - 1,
                                    static_cast<std::size_t>(q * sa.size()))];
      const double vb = sb[std::min(sb.size() - 1,
                                    static_cast<std::size_t>(q * sb.size()))];
      acc += std::abs(va - vb);
    }
  }
  return acc / static_cast<double>(m);
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.count = values.size();
  if (s.count == 0) return s;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(s.count);
  s.mean = mean;
  if (s.count >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.variance = ss / static_cast<double>(s.count - 1);
    s.ci_half = 1.96 * std::sqrt(s.variance / static_cast<double>(s.count));
  }
  return s;
}

std::vector<ConvergenceRow> convergence_table(
    const std::vector<std::pair<long, std::vector<double>>>& ladder,
    std::span<const double> reference) {
  std::vector<ConvergenceRow> rows;
  rows.reserve(ladder.size());
  for (const auto& [n, sample] : ladder) {
    ConvergenceRow r;
    r.n = n;
    r.reps = sample.size();
    const auto ks = ks_two_sample(sample, reference);
    r.ks_d = ks.d;
    r.ks_p = ks.p_value;
    r.w1 = wasserstein1(sample, reference);
    const auto s = summarize(sample);
    r.mean = s.mean;
    r.variance = s.variance;
    r.mean_ci_half = s.ci_half;
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(),
            [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.n < b.n; });
  return rows;
}

}  // namespace hwsim
