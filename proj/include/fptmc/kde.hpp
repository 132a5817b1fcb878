#pragma once

#include <cstddef>
#include <vector>

namespace fptmc {

/// Crossing samples pooled over n_runs Monte Carlo runs. Points are stored
/// flat: sample k occupies points[k*dim .. k*dim+dim).
struct WeightedSamples
{
  std::size_t dim = 1;
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t n_runs = 0;

  std::size_t size() const { return weights.size(); }
  void push(double t, double w)
  {
    points.push_back(t);
    weights.push_back(w);
  }
  /// Throws std::invalid_argument if lengths disagree, a weight is negative,
  /// or n_runs is smaller than the sample count.
  void validate() const;
};

/// Gamma reference density alpha^beta t^(beta-1) e^(-alpha t) / Gamma(beta).
struct GammaFit
{
  double alpha = 1.0;
  double beta = 3.0;
};

inline constexpr double kMinGammaShape = 3.0;

/// Density evaluated on a tensor grid. axes.size() is the dimension; values
/// are row-major with the last axis fastest.
struct DensityEstimate
{
  std::vector<std::vector<double>> axes;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t sample_count = 0;
  double total_mass = 0.0;

  std::size_t dim() const { return axes.size(); }
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

/// 1-D kernel exp(-x^2 / (h^2/2)) / (sqrt(pi/2) h), i.e. a Normal(0, (h/2)^2) density.
double gaussian_kernel(double h, double x);

/// m-D product Gaussian kernel (2 pi h^2)^(-m/2) exp(-|x|^2 / (2 h^2)).
double gaussian_kernel_multi(double h, const double* x, std::size_t m);

/// Method-of-moments gamma fit: beta = mean^2 / var clamped to at least 3,
/// alpha = beta / mean (= mean / var when no clamping happens).
/// Throws std::invalid_argument for fewer than two samples, zero variance,
/// or a nonpositive mean.
GammaFit gamma_moment_fit(const std::vector<double>& times);

/// Integral of the squared second derivative of the gamma reference density.
double roughness_functional(const GammaFit& fit);

/// (2 n sqrt(pi) R)^(-1/5) with R the roughness of the gamma reference.
double optimal_bandwidth_1d(const GammaFit& fit, std::size_t n);

/// Normal-reference bandwidth for the m-variate product kernel.
double optimal_bandwidth_multi(std::size_t m, std::size_t n);

/// f(t) = sum_k w_k K(h, t - s_k) / n_runs on the given sorted grid.
DensityEstimate estimate_density_1d(const WeightedSamples& samples, const std::vector<double>& grid,
                                    double h);

/// Same estimator with the m-D kernel over the tensor product of axes.
DensityEstimate estimate_density_multi(const WeightedSamples& samples,
                                       const std::vector<std::vector<double>>& axes, double h);

/// Tensor-product trapezoidal integral of values over the estimate's grid.
double trapezoid_mass(const std::vector<std::vector<double>>& axes, const std::vector<double>& values);

/// Integral of |a - b| divided by the mass of the reference b. Grids must match.
double normalized_l1(const DensityEstimate& a, const DensityEstimate& reference);

}  // namespace fptmc
