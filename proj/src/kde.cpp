#include "fptmc/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fptmc {

namespace {

// exp(-x) is exactly zero in double precision past this point, so kernel
// contributions beyond it can be skipped without changing any result.
constexpr double kExpUnderflow = 746.0;

/// Indices [first, last) of sorted grid points within radius of centre.
std::pair<std::size_t, std::size_t> window(const std::vector<double>& grid, double centre,
                                           double radius)
{
  auto lo = std::lower_bound(grid.begin(), grid.end(), centre - radius);
  auto hi = std::upper_bound(lo, grid.end(), centre + radius);
  return {static_cast<std::size_t>(lo - grid.begin()), static_cast<std::size_t>(hi - grid.begin())};
}

double trapezoid_weight(const std::vector<double>& axis, std::size_t k)
{
  const std::size_t n = axis.size();
  if (n < 2)
    return 0.0;
  double w = 0.0;
  if (k > 0)
    w += 0.5 * (axis[k] - axis[k - 1]);
  if (k + 1 < n)
    w += 0.5 * (axis[k + 1] - axis[k]);
  return w;
}

}  // namespace

void WeightedSamples::validate() const
{
  if (dim == 0)
    throw std::invalid_argument("WeightedSamples: dim must be positive");
  if (points.size() != weights.size() * dim)
    throw std::invalid_argument("WeightedSamples: points and weights lengths disagree");
  if (n_runs < weights.size())
    throw std::invalid_argument("WeightedSamples: n_runs smaller than sample count");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("WeightedSamples: weights must be finite and nonnegative");
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points)
{
  if (points < 2 || !(hi > lo))
    throw std::invalid_argument("uniform_grid: need at least 2 points and hi > lo");
  std::vector<double> g(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k)
    g[k] = lo + step * static_cast<double>(k);
  g.back() = hi;
  return g;
}

double gaussian_kernel(double h, double x)
{
  if (!(h > 0.0))
    throw std::invalid_argument("gaussian_kernel: bandwidth must be positive");
  return std::exp(-x * x / (0.5 * h * h)) / (std::sqrt(0.5 * std::numbers::pi) * h);
}

double gaussian_kernel_multi(double h, const double* x, std::size_t m)
{
  if (!(h > 0.0))
    throw std::invalid_argument("gaussian_kernel_multi: bandwidth must be positive");
  double r2 = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    r2 += x[k] * x[k];
  const double norm = std::pow(2.0 * std::numbers::pi * h * h, -0.5 * static_cast<double>(m));
  return norm * std::exp(-r2 / (2.0 * h * h));
}

GammaFit gamma_moment_fit(const std::vector<double>& times)
{
  if (times.size() < 2)
    throw std::invalid_argument("gamma_moment_fit: need at least two samples");
  const double n = static_cast<double>(times.size());
  double sum = 0.0;
  for (double t : times)
    sum += t;
  const double mean = sum / n;
  // Central second moment; same quantity as E[t^2] - mean^2 without the cancellation.
  double ss = 0.0;
  for (double t : times)
    ss += (t - mean) * (t - mean);
  const double var = ss / n;
  if (!(var > 0.0))
    throw std::invalid_argument("gamma_moment_fit: zero sample variance");
  if (!(mean > 0.0))
    throw std::invalid_argument("gamma_moment_fit: sample mean must be positive");
  // alpha = beta / mean keeps the fitted mean at the sample mean; it equals
  // mean / var whenever the shape is not clamped.
  const double beta = std::max(mean * mean / var, kMinGammaShape);
  return {beta / mean, beta};
}

double roughness_functional(const GammaFit& fit)
{
  const double a = fit.alpha;
  const double b = fit.beta;
  if (!(b >= kMinGammaShape))
    throw std::invalid_argument("roughness_functional: beta must be at least 3");
  if (!(a > 0.0))
    throw std::invalid_argument("roughness_functional: alpha must be positive");

  const double A = a * a;
  const double B = -2.0 * a * (b - 1.0);
  const double C = (b - 1.0) * (b - 2.0);
  const double W[5] = {A * A, 2.0 * A * B, B * B + 2.0 * A * C, 2.0 * B * C, C * C};

  // Work in logs: Gamma(2 beta - i) overflows long before the ratio does.
  const double log_gamma_beta = std::lgamma(b);
  double total = 0.0;
  for (int i = 1; i <= 5; ++i) {
    const double k = 2.0 * b - i;
    const double log_mag = i * std::log(a) + std::lgamma(k) - k * std::numbers::ln2
                           - 2.0 * log_gamma_beta;
    total += W[i - 1] * std::exp(log_mag);
  }
  return total;
}

double optimal_bandwidth_1d(const GammaFit& fit, std::size_t n)
{
  if (n == 0)
    throw std::invalid_argument("optimal_bandwidth_1d: n must be positive");
  const double r = roughness_functional(fit);
  return std::pow(2.0 * static_cast<double>(n) * std::sqrt(std::numbers::pi) * r, -0.2);
}

double optimal_bandwidth_multi(std::size_t m, std::size_t n)
{
  if (m == 0 || n == 0)
    throw std::invalid_argument("optimal_bandwidth_multi: m and n must be positive");
  const double e = 1.0 / static_cast<double>(m + 4);
  return std::pow(static_cast<double>(n), -e) * std::pow(4.0 / (2.0 * m + 1.0), e);
}

double trapezoid_mass(const std::vector<std::vector<double>>& axes, const std::vector<double>& values)
{
  const std::size_t dim = axes.size();
  if (dim == 0)
    return 0.0;
  std::vector<std::size_t> idx(dim, 0);
  double total = 0.0;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d)
      w *= trapezoid_weight(axes[d], idx[d]);
    total += w * values[flat];
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] < axes[d].size())
        break;
      idx[d] = 0;
    }
  }
  return total;
}

DensityEstimate estimate_density_1d(const WeightedSamples& samples, const std::vector<double>& grid,
                                    double h)
{
  if (!(h > 0.0))
    throw std::invalid_argument("estimate_density_1d: bandwidth must be positive");
  if (samples.dim != 1)
    throw std::invalid_argument("estimate_density_1d: samples must be one-dimensional");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("estimate_density_1d: grid must be sorted");
  samples.validate();

  DensityEstimate est;
  est.axes = {grid};
  est.values.assign(grid.size(), 0.0);
  est.bandwidth = h;
  est.sample_count = samples.size();
  if (samples.size() == 0 || samples.n_runs == 0)
    return est;

  const double norm = 1.0 / (std::sqrt(0.5 * std::numbers::pi) * h);
  const double inv = 2.0 / (h * h);
  const double radius = h * std::sqrt(kExpUnderflow / 2.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double s = samples.points[k];
    const double w = samples.weights[k];
    if (w == 0.0)
      continue;
    const auto [lo, hi] = window(grid, s, radius);
    for (std::size_t g = lo; g < hi; ++g) {
      const double x = grid[g] - s;
      est.values[g] += w * std::exp(-x * x * inv);
    }
  }
  const double scale = norm / static_cast<double>(samples.n_runs);
  for (double& v : est.values)
    v *= scale;
  est.total_mass = trapezoid_mass(est.axes, est.values);
  return est;
}

DensityEstimate estimate_density_multi(const WeightedSamples& samples,
                                       const std::vector<std::vector<double>>& axes, double h)
{
  if (!(h > 0.0))
    throw std::invalid_argument("estimate_density_multi: bandwidth must be positive");
  const std::size_t m = axes.size();
  if (m == 0 || samples.dim != m)
    throw std::invalid_argument("estimate_density_multi: sample dimension must match the grid");
  for (const auto& ax : axes)
    if (ax.empty() || !std::is_sorted(ax.begin(), ax.end()))
      throw std::invalid_argument("estimate_density_multi: grid axes must be sorted and nonempty");
  samples.validate();

  std::size_t cells = 1;
  for (const auto& ax : axes)
    cells *= ax.size();

  DensityEstimate est;
  est.axes = axes;
  est.values.assign(cells, 0.0);
  est.bandwidth = h;
  est.sample_count = samples.size();
  if (samples.size() == 0 || samples.n_runs == 0)
    return est;

  // The kernel factorises over coordinates; evaluate one factor per axis and
  // accumulate the outer product over the cells inside every factor's window.
  const double inv = 1.0 / (2.0 * h * h);
  const double radius = h * std::sqrt(2.0 * kExpUnderflow);
  std::vector<std::vector<double>> factor(m);
  std::vector<std::size_t> lo(m), hi(m), idx(m), stride(m);
  stride[m - 1] = 1;
  for (std::size_t d = m - 1; d-- > 0;)
    stride[d] = stride[d + 1] * axes[d + 1].size();

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double w = samples.weights[k];
    if (w == 0.0)
      continue;
    bool empty = false;
    for (std::size_t d = 0; d < m; ++d) {
      const double s = samples.points[k * m + d];
      std::tie(lo[d], hi[d]) = window(axes[d], s, radius);
      factor[d].resize(hi[d] - lo[d]);
      for (std::size_t g = lo[d]; g < hi[d]; ++g) {
        const double x = axes[d][g] - s;
        factor[d][g - lo[d]] = std::exp(-x * x * inv);
      }
      empty = empty || lo[d] == hi[d];
    }
    if (empty)
      continue;
    idx = lo;
    while (true) {
      double v = w;
      std::size_t flat = 0;
      for (std::size_t d = 0; d < m; ++d) {
        v *= factor[d][idx[d] - lo[d]];
        flat += idx[d] * stride[d];
      }
      est.values[flat] += v;
      bool done = true;
      for (std::size_t d = m; d > 0; --d) {
        if (++idx[d - 1] < hi[d - 1]) {
          done = false;
          break;
        }
        idx[d - 1] = lo[d - 1];
      }
      if (done)
        break;
    }
  }
  const double norm = std::pow(2.0 * std::numbers::pi * h * h, -0.5 * static_cast<double>(m));
  const double scale = norm / static_cast<double>(samples.n_runs);
  for (double& v : est.values)
    v *= scale;
  est.total_mass = trapezoid_mass(est.axes, est.values);
  return est;
}

double normalized_l1(const DensityEstimate& a, const DensityEstimate& reference)
{
  if (a.axes != reference.axes || a.values.size() != reference.values.size())
    throw std::invalid_argument("normalized_l1: estimates live on different grids");
  std::vector<double> diff(a.values.size());
  for (std::size_t k = 0; k < diff.size(); ++k)
    diff[k] = std::abs(a.values[k] - reference.values[k]);
  const double mass = trapezoid_mass(reference.axes, reference.values);
  if (!(mass > 0.0))
    throw std::invalid_argument("normalized_l1: reference has no mass");
  return trapezoid_mass(a.axes, diff) / mass;
}

}  // namespace fptmc
