#include "fptmc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

namespace fptmc {

bool RunOutcome::all_crossed() const
{
  return std::all_of(crossings.begin(), crossings.end(), [](const auto& c) { return c.has_value(); });
}

double EngineResult::crossing_probability(std::size_t i) const
{
  double sum = 0.0;
  for (double w : marginals.at(i).weights)
    sum += w;
  return sum / static_cast<double>(n_runs);
}

double EngineResult::crossing_frequency(std::size_t i) const
{
  return static_cast<double>(marginals.at(i).size()) / static_cast<double>(n_runs);
}

namespace {

struct ChunkResult
{
  std::vector<RunOutcome> outcomes;  // runs with at least one crossing
  std::size_t jumps = 0;
  std::size_t grazing = 0;
};

}  // namespace

EngineResult run_chunked(std::size_t m, std::size_t n_runs, std::uint64_t seed, std::size_t workers,
                         const std::function<RunFunction()>& make_runner)
{
  if (n_runs == 0)
    throw std::invalid_argument("engine: n_runs must be at least 1");
  if (workers == 0)
    throw std::invalid_argument("engine: workers must be at least 1");

  const std::size_t chunks = (n_runs + kRunsPerChunk - 1) / kRunsPerChunk;
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    RunFunction run = make_runner();
    RunOutcome outcome;
    for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      Rng rng = make_stream(seed, c);
      const std::size_t first = c * kRunsPerChunk;
      const std::size_t last = std::min(n_runs, first + kRunsPerChunk);
      auto& chunk = results[c];
      for (std::size_t r = first; r < last; ++r) {
        outcome.reset(m);
        outcome.run_index = r;
        run(rng, outcome);
        chunk.jumps += outcome.jumps;
        chunk.grazing += outcome.grazing;
        if (std::any_of(outcome.crossings.begin(), outcome.crossings.end(),
                        [](const auto& x) { return x.has_value(); }))
          chunk.outcomes.push_back(outcome);
      }
    }
  };

  const auto start = std::chrono::steady_clock::now();
  const std::size_t threads = std::min(workers, chunks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  const auto stop = std::chrono::steady_clock::now();

  EngineResult res;
  res.m = m;
  res.n_runs = n_runs;
  res.seed = seed;
  res.workers = workers;
  res.seconds_per_run = std::chrono::duration<double>(stop - start).count() / static_cast<double>(n_runs);
  res.marginals.assign(m, WeightedSamples{});
  for (auto& ws : res.marginals)
    ws.n_runs = n_runs;
  res.joint.dim = m;
  res.joint.n_runs = n_runs;

  for (const auto& chunk : results) {
    res.total_jumps += chunk.jumps;
    res.grazing_events += chunk.grazing;
    for (const auto& o : chunk.outcomes) {
      double joint_weight = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (const auto& c = o.crossings[i]) {
          res.marginals[i].push(c->s, c->weight);
          joint_weight *= c->weight;
        }
      }
      if (o.all_crossed()) {
        for (std::size_t i = 0; i < m; ++i)
          res.joint.points.push_back(o.crossings[i]->s);
        res.joint.weights.push_back(joint_weight);
      }
    }
  }
  return res;
}

double marginal_bandwidth(const WeightedSamples& samples, double horizon)
{
  const double fallback = 0.01 * horizon;
  if (samples.size() < 2)
    return fallback;
  try {
    const GammaFit fit = gamma_moment_fit(samples.points);
    return optimal_bandwidth_1d(fit, samples.size());
  } catch (const std::invalid_argument&) {
    return fallback;
  }
}

DensitySet estimate_densities(const EngineResult& result, const DensityOptions& options)
{
  DensitySet out;
  const auto grid = uniform_grid(0.0, options.horizon, options.grid_points);
  for (const auto& samples : result.marginals)
    out.marginals.push_back(
        estimate_density_1d(samples, grid, marginal_bandwidth(samples, options.horizon)));

  if (result.m >= 2) {
    const auto axis = uniform_grid(0.0, options.horizon, options.joint_grid_points);
    std::vector<std::vector<double>> axes(result.m, axis);
    const double h = optimal_bandwidth_multi(result.m, std::max<std::size_t>(result.joint.size(), 1));
    out.joint = estimate_density_multi(result.joint, axes, h);
  }
  return out;
}

}  // namespace fptmc
