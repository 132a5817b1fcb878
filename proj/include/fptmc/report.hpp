#pragma once

#include "fptmc/config.hpp"
#include "fptmc/engine.hpp"
#include "fptmc/kde.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fptmc {

/// Per-engine figures that go into the comparison table.
struct EngineSummary
{
  std::string name;
  std::vector<double> bandwidths;       // one per process
  double joint_bandwidth = 0.0;         // 0 when m == 1
  double seconds_per_run = 0.0;
  std::vector<double> crossing_probability;
  std::vector<std::size_t> sample_counts;
  std::size_t joint_samples = 0;
};

struct ComparisonReport
{
  std::size_t m = 0;
  std::size_t n_runs = 0;
  std::optional<EngineSummary> unif;
  std::optional<EngineSummary> cmc;
  std::optional<double> cmc_dt;
  /// cmc seconds per run over unif seconds per run.
  std::optional<double> speedup;
  /// Per-process normalized L1 distance of the UNIF marginal from the CMC one.
  std::vector<double> l1_distance;
};

EngineSummary summarize(const std::string& name, const EngineResult& result,
                        const DensitySet& densities);

/// Writes `# t,density` (1-D) or `# t1,...,tm,density` rows, 17 significant
/// digits, LF line endings. Throws std::runtime_error naming the path.
void emit_density_csv(const DensityEstimate& estimate, const std::filesystem::path& path);

std::string format_report(const ComparisonReport& report);

/// Runs the configured engines, writes density files plus report.txt into
/// cfg.out_dir, and returns the comparison.
ComparisonReport run_experiment(const ExperimentConfig& cfg);

}  // namespace fptmc
