#pragma once

#include "fptmc/random.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace fptmc {

/// Dense row-major matrix, just enough for the diffusion coefficients.
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n, double scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const
  {
    return {data_.data() + r * cols_, cols_};
  }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// D(t) = intercept + slope * t
struct LinearBarrier
{
  double intercept = 0.0;
  double slope = 0.0;

  bool operator==(const LinearBarrier&) const = default;
};

double barrier_at(const LinearBarrier& b, double t);

/// Constant-coefficient multivariate jump-diffusion
///   dX = mu dt + sigma dW + dZ
/// with one Poisson jump clock shared by every component and per-component
/// Normal(jump_mean, jump_sd^2) jump sizes, observed against linear barriers
/// over [0, horizon].
struct ModelSpec
{
  std::size_t m = 0;
  std::vector<double> x0;
  std::vector<double> mu;
  Matrix sigma;
  double lambda = 0.0;
  std::vector<double> jump_mean;
  std::vector<double> jump_sd;
  std::vector<LinearBarrier> barrier;
  double horizon = 1.0;

  /// Throws std::invalid_argument describing the first violated invariant.
  /// The bridge formulas divide by each row's effective volatility, so
  /// all-zero diffusion rows are rejected unless require_diffusion is false.
  void validate(bool require_diffusion = true) const;

  bool operator==(const ModelSpec&) const = default;
};

/// Parameter set shared by the three reference experiments; only the jump
/// rate differs between them (1, 3, 8).
ModelSpec reference_example(double lambda);

/// Draws the jump size of component i. Engines take one of these so that
/// jump laws other than the normal can be plugged in.
class JumpSizeLaw
{
public:
  virtual ~JumpSizeLaw() = default;
  virtual double draw(std::size_t i, Rng& rng) const = 0;
};

class NormalJumpLaw final : public JumpSizeLaw
{
public:
  NormalJumpLaw(std::vector<double> mean, std::vector<double> sd);
  explicit NormalJumpLaw(const ModelSpec& spec) : NormalJumpLaw(spec.jump_mean, spec.jump_sd) {}

  double draw(std::size_t i, Rng& rng) const override;

private:
  std::vector<double> mean_;
  std::vector<double> sd_;
};

/// Jump instants of one run together with the process values on both sides
/// of every jump. instants = {0, T_1, ..., T_M, T}.
struct JumpTimeline
{
  std::vector<double> instants;
  std::size_t m = 0;
  // pre_jump[j * m + i] = X_i(T_{j+1}^-), j = 0..M (the last entry is at T)
  std::vector<double> pre_jump;
  // post_jump[j * m + i] = X_i(T_{j+1}^+), j = 0..M-1
  std::vector<double> post_jump;

  std::size_t jump_count() const { return instants.size() - 2; }

  /// X_i just before jump number j (1-based); j = M + 1 is the horizon value.
  double pre(std::size_t i, std::size_t j) const { return pre_jump[(j - 1) * m + i]; }
  /// X_i just after jump number j (1-based, j <= M).
  double post(std::size_t i, std::size_t j) const { return post_jump[(j - 1) * m + i]; }
};

/// Euclidean norm of row i of sigma. Throws on an all-zero row.
double effective_sigma(const Matrix& sigma, std::size_t i);

/// Jump instants in (0, T) from accumulated Exponential(rate lambda) gaps.
std::vector<double> sample_jump_instants(double lambda, double horizon, Rng& rng);

/// Exact Gaussian transition of the diffusion part over dt (no jumps).
std::vector<double> propagate_interjump(std::span<const double> state, double dt,
                                        const ModelSpec& spec, Rng& rng);

/// In-place variant used by the engines; scratch must hold spec.m doubles.
void propagate_interjump_inplace(std::span<double> state, double dt, const ModelSpec& spec,
                                 std::span<double> scratch, Rng& rng);

std::vector<double> apply_jump(std::span<const double> state, const ModelSpec& spec, Rng& rng);
std::vector<double> apply_jump(std::span<const double> state, const JumpSizeLaw& law, Rng& rng);

JumpTimeline build_timeline(const ModelSpec& spec, Rng& rng);

/// Reuses the storage of out. Callers running many timelines should prefer this.
void build_timeline(const ModelSpec& spec, const JumpSizeLaw& law, Rng& rng, JumpTimeline& out);

}  // namespace fptmc
