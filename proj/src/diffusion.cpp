#include "hwsim/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hwsim {

DriftSample sample_drift(const LimitParams& params, const InitialStateSpec& init,
                         RngStream& init_rng, RngStream& zeta_rng) {
  DriftSample d;
  const InitialDraw draw = sample_xi0_nu(init, init_rng);
  d.xi0 = draw.xi0;
  d.nu = draw.nu;
  d.zeta = params.zeta_var > 0.0 ? zeta_rng.normal(0.0, std::sqrt(params.zeta_var)) : 0.0;
  d.beta = params.lambda_hat - params.mu_hat_mean - d.zeta - params.mu * d.nu;
  return d;
}

namespace {

long resolve_stride(const DiffusionSpec& spec) {
  if (spec.record_stride > 0) return spec.record_stride;
  const long s = std::lround(0.01 / spec.step);
  return std::max(1L, s);
}

void check_spec(const DiffusionSpec& spec) {
  if (!(spec.step > 0.0)) throw std::invalid_argument("diffusion: step must be positive");
  if (spec.horizon < 0.0) throw std::invalid_argument("diffusion: negative horizon");
  if (spec.sigma < 0.0) throw std::invalid_argument("diffusion: negative sigma");
}

template <typename NextZ>
DiffusionPath integrate(const DriftSample& drift, const DiffusionSpec& spec,
                        NextZ&& next_z) {
  check_spec(spec);
  const long steps = std::lround(spec.horizon / spec.step);
  if (std::abs(static_cast<double>(steps) * spec.step - spec.horizon) > 1e-9)
    throw std::invalid_argument("diffusion: horizon must be a multiple of the step");
  const long stride = resolve_stride(spec);
  const double h = spec.step;
  const double sqh = std::sqrt(h);

  DiffusionPath path;
  path.drift = drift;
  path.t.reserve(steps / stride + 2);
  path.xi.reserve(steps / stride + 2);
  double xi = drift.xi0;
  double w = 0.0;
  path.t.push_back(0.0);
  path.xi.push_back(xi);
  for (long j = 0; j < steps; ++j) {
    const double z = next_z();
    xi += (drift.beta + spec.g * std::max(-xi, 0.0)) * h + spec.sigma * sqh * z;
    w += sqh * z;
    if ((j + 1) % stride == 0 || j + 1 == steps) {
      path.t.push_back(static_cast<double>(j + 1) * h);
      path.xi.push_back(xi);
    }
  }
  path.w_terminal = w;
  return path;
}

}  // namespace

DiffusionPath euler_path(const DriftSample& drift, const DiffusionSpec& spec,
                         RngStream& noise) {
  return integrate(drift, spec, [&noise] { return noise.normal(); });
}

DiffusionPath euler_path_from_normals(const DriftSample& drift,
                                      const DiffusionSpec& spec,
                                      std::span<const double> z) {
  std::size_t i = 0;
  auto path = integrate(drift, spec, [&z, &i] {
    if (i >= z.size()) throw std::invalid_argument("diffusion: not enough normals");
    return z[i++];
  });
  return path;
}

std::vector<double> marginal_at(const std::vector<DiffusionPath>& paths, double t,
                                bool* snapped) {
  if (paths.empty()) return {};
  const auto& grid = paths.front().t;
  if (t > grid.back() + 1e-9)
    throw std::out_of_range("marginal_at: t beyond the recorded horizon");
  // nearest recorded point
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  std::size_t idx = it == grid.end() ? grid.size() - 1 : it - grid.begin();
  if (idx > 0 && t - grid[idx - 1] < grid[idx] - t) --idx;
  if (snapped) *snapped = std::abs(grid[idx] - t) > 1e-9;
  std::vector<double> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.t.size() != grid.size())
      throw std::invalid_argument("marginal_at: paths recorded on different grids");
    out.push_back(p.xi[idx]);
  }
  return out;
}

}  // namespace hwsim
