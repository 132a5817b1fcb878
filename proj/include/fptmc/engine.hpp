#pragma once

#include "fptmc/kde.hpp"
#include "fptmc/model.hpp"
#include "fptmc/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace fptmc {

enum class CrossingKind
{
  interior,
  at_jump,
};

struct FptSample
{
  double s = 0.0;
  double weight = 1.0;
  CrossingKind kind = CrossingKind::interior;
};

/// What one Monte Carlo run produced: at most one crossing per process.
struct RunOutcome
{
  std::size_t run_index = 0;
  std::vector<std::optional<FptSample>> crossings;
  std::size_t jumps = 0;
  std::size_t grazing = 0;  // segments entered already at or below the barrier

  void reset(std::size_t m)
  {
    crossings.assign(m, std::nullopt);
    jumps = 0;
    grazing = 0;
  }
  bool all_crossed() const;
};

struct EngineResult
{
  std::size_t m = 0;
  std::vector<WeightedSamples> marginals;
  /// Runs in which every process crossed; weight is the product of the
  /// per-process weights of that run.
  WeightedSamples joint;
  std::size_t n_runs = 0;
  double seconds_per_run = 0.0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t total_jumps = 0;
  std::size_t grazing_events = 0;

  /// Sum of marginal weights over n_runs: the estimated probability that
  /// process i crosses within the horizon.
  double crossing_probability(std::size_t i) const;
  /// Fraction of runs in which process i crossed at all (unweighted).
  double crossing_frequency(std::size_t i) const;
};

/// Runs are grouped in fixed chunks; chunk c draws from make_stream(seed, c)
/// whichever worker executes it, so results do not depend on the worker count.
inline constexpr std::size_t kRunsPerChunk = 1024;

using RunFunction = std::function<void(Rng&, RunOutcome&)>;

/// Executes n_runs runs across `workers` threads. make_runner is called once
/// per worker thread and returns the per-run callable (which may own scratch
/// buffers). Outcomes are merged in run order.
EngineResult run_chunked(std::size_t m, std::size_t n_runs, std::uint64_t seed, std::size_t workers,
                         const std::function<RunFunction()>& make_runner);

struct DensityOptions
{
  double horizon = 1.0;
  std::size_t grid_points = 512;
  std::size_t joint_grid_points = 128;
};

struct DensitySet
{
  std::vector<DensityEstimate> marginals;
  std::optional<DensityEstimate> joint;  // only when m >= 2
};

/// Bandwidth used for a marginal: gamma-reference optimum over the crossing
/// times, or 1% of the horizon when fewer than two distinct times exist.
double marginal_bandwidth(const WeightedSamples& samples, double horizon);

/// Marginals via the gamma-reference bandwidth; joint via the normal-reference
/// bandwidth with complete crossing tuples only.
DensitySet estimate_densities(const EngineResult& result, const DensityOptions& options);

}  // namespace fptmc
