#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's bridge or kde formulas.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Upper-tail p-value of a chi-square statistic.
inline double chi_square_p(double statistic, double dof)
{
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

/// Integral over (a, b) with endpoint singularities allowed.
template <class F>
double integrate(F f, double a, double b, double tol = 1e-12)
{
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, tol);
}

/// Integral over (0, inf).
template <class F>
double integrate_half_line(F f, double tol = 1e-12)
{
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate(f, 0.0, std::numeric_limits<double>::infinity(), tol);
}

/// Gamma density and its second derivative written out directly from
/// f(t) = a^b t^(b-1) e^(-a t) / Gamma(b).
inline double gamma_pdf(double a, double b, double t)
{
  return std::exp(b * std::log(a) + (b - 1.0) * std::log(t) - a * t - std::lgamma(b));
}

inline double gamma_pdf_second_derivative(double a, double b, double t)
{
  // (log f)' = (b-1)/t - a, (log f)'' = -(b-1)/t^2, f'' = f ((log f)'^2 + (log f)'')
  // Multiplied through by t^2 so nothing overflows near t = 0.
  const double t_d1 = (b - 1.0) - a * t;
  const double t2_d2 = -(b - 1.0);
  if (!(t > 0.0))
    return 0.0;
  const double log_scale = b * std::log(a) + (b - 3.0) * std::log(t) - a * t - std::lgamma(b);
  return std::exp(log_scale) * (t_d1 * t_d1 + t2_d2);
}

inline double roughness_by_quadrature(double a, double b)
{
  auto sq = [&](double t) {
    const double v = gamma_pdf_second_derivative(a, b, t);
    return v * v;
  };
  // Split at the mode region so exp_sinh sees a smooth tail.
  const double cut = b / a;
  return integrate(sq, 0.0, cut, 1e-14) + integrate_half_line([&](double u) { return sq(cut + u); }, 1e-14);
}

/// Independent bridge density check: hitting density of the level times the
/// Gaussian transition from the level to the endpoint, over the density of
/// the endpoint itself.
inline double bridge_density_by_ratio(double x_start, double x_end, double level, double mu,
                                      double sigma, double tau, double elapsed)
{
  const double rest = tau - elapsed;
  const double dist = x_start - level;
  const double hit = dist / (sigma * std::sqrt(2.0 * std::numbers::pi * elapsed * elapsed * elapsed))
                     * std::exp(-std::pow(dist + mu * elapsed, 2) / (2.0 * sigma * sigma * elapsed));
  const double move = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi * rest))
                      * std::exp(-std::pow(x_end - level - mu * rest, 2) / (2.0 * sigma * sigma * rest));
  const double endpoint = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi * tau))
                          * std::exp(-std::pow(x_end - x_start - mu * tau, 2) / (2.0 * sigma * sigma * tau));
  return hit * move / endpoint;
}

/// Brownian bridges pinned at x_start and x_end, monitored on nested grids
/// whose step grows by 4 per level. Discrete monitoring misses excursions,
/// biasing survival by a series in sqrt(step); Richardson weights cancel the
/// sqrt(step) term (2 levels: 2, -1) or also the step term (3 levels:
/// 8/3, -2, 1/3). The coarsest grid has `coarse_steps` steps.
struct BridgeMonteCarlo
{
  double x_start, x_end, level, sigma, tau;
  std::size_t coarse_steps = 1000;
  std::size_t bins = 0;  // histogram of first crossing times, 0 to disable
  std::size_t levels = 2;

  struct Result
  {
    double survival = 0.0;  // extrapolated P(min > level)
    double survival_se = 0.0;
    double fine_survival = 0.0;
    std::vector<double> bin_mass;  // extrapolated P(first crossing in bin)
    std::vector<double> bin_se;
  };

  Result run(std::size_t paths, std::mt19937_64& rng) const
  {
    if (levels != 2 && levels != 3)
      throw std::invalid_argument("BridgeMonteCarlo: levels must be 2 or 3");
    const std::vector<double> weight = levels == 2 ? std::vector<double>{2.0, -1.0}
                                                   : std::vector<double>{8.0 / 3.0, -2.0, 1.0 / 3.0};
    const std::size_t coarse_stride = levels == 2 ? 4 : 16;
    const std::size_t fine = coarse_steps * coarse_stride;
    const double dt = tau / static_cast<double>(fine);
    const double sd = sigma * std::sqrt(dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(fine + 1);

    double sum = 0.0, sum2 = 0.0, fine_sum = 0.0;
    std::vector<double> bsum(bins, 0.0), bsum2(bins, 0.0), yb(bins);
    std::vector<std::ptrdiff_t> first(levels);
    for (std::size_t p = 0; p < paths; ++p) {
      w[0] = 0.0;
      for (std::size_t k = 1; k <= fine; ++k)
        w[k] = w[k - 1] + sd * normal(rng);
      const double wT = w[fine];
      std::fill(first.begin(), first.end(), -1);
      for (std::size_t k = 1; k <= fine; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(fine);
        const double x = x_start + (x_end - x_start) * frac + (w[k] - frac * wT);
        if (x > level)
          continue;
        std::size_t stride = 1;
        for (std::size_t l = 0; l < levels; ++l, stride *= 4)
          if (first[l] < 0 && k % stride == 0)
            first[l] = static_cast<std::ptrdiff_t>(k);
        if (first[levels - 1] >= 0)
          break;
      }
      double y = 0.0;
      for (std::size_t l = 0; l < levels; ++l)
        y += weight[l] * (first[l] < 0);
      sum += y;
      sum2 += y * y;
      fine_sum += first[0] < 0;
      if (bins) {
        // Crossing time taken at the middle of the step where it was detected.
        std::fill(yb.begin(), yb.end(), 0.0);
        double step = 1.0;
        for (std::size_t l = 0; l < levels; ++l, step *= 4.0) {
          if (first[l] < 0)
            continue;
          const double t = (static_cast<double>(first[l]) - 0.5 * step) * dt;
          yb[std::min<std::size_t>(bins - 1, static_cast<std::size_t>(t / tau * bins))] += weight[l];
        }
        for (std::size_t b = 0; b < bins; ++b) {
          bsum[b] += yb[b];
          bsum2[b] += yb[b] * yb[b];
        }
      }
    }
    const double n = static_cast<double>(paths);
    Result r;
    r.survival = sum / n;
    r.survival_se = std::sqrt((sum2 / n - r.survival * r.survival) / n);
    r.fine_survival = fine_sum / n;
    for (std::size_t b = 0; b < bins; ++b) {
      const double m = bsum[b] / n;
      r.bin_mass.push_back(m);
      r.bin_se.push_back(std::sqrt((bsum2[b] / n - m * m) / n));
    }
    return r;
  }
};

}  // namespace oracle
