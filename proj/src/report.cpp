#include "fptmc/report.hpp"

#include "fptmc/engine_cmc.hpp"
#include "fptmc/engine_unif.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fptmc {

namespace {

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that reads back as the same double.
std::string shortest(double v)
{
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string general6(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed6(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error(path.string() + ": cannot open for writing");
  out << contents;
  out.close();
  if (!out)
    throw std::runtime_error(path.string() + ": write failed");
}

void write_densities(const std::filesystem::path& dir, const std::string& prefix,
                     const DensitySet& set)
{
  for (std::size_t i = 0; i < set.marginals.size(); ++i)
    emit_density_csv(set.marginals[i], dir / (prefix + "_density_x" + std::to_string(i + 1) + ".csv"));
  if (set.joint)
    emit_density_csv(*set.joint, dir / (prefix + "_density_joint.csv"));
}

}  // namespace

EngineSummary summarize(const std::string& name, const EngineResult& result,
                        const DensitySet& densities)
{
  EngineSummary s;
  s.name = name;
  for (std::size_t i = 0; i < result.m; ++i) {
    s.bandwidths.push_back(densities.marginals[i].bandwidth);
    s.crossing_probability.push_back(result.crossing_probability(i));
    s.sample_counts.push_back(result.marginals[i].size());
  }
  if (densities.joint)
    s.joint_bandwidth = densities.joint->bandwidth;
  s.joint_samples = result.joint.size();
  s.seconds_per_run = result.seconds_per_run;
  return s;
}

void emit_density_csv(const DensityEstimate& est, const std::filesystem::path& path)
{
  const std::size_t dim = est.dim();
  if (dim == 0)
    throw std::invalid_argument("emit_density_csv: estimate has no grid");
  std::string text = "# ";
  if (dim == 1) {
    text += "t,density\n";
  } else {
    for (std::size_t d = 0; d < dim; ++d)
      text += "t" + std::to_string(d + 1) + ",";
    text += "density\n";
  }
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t flat = 0; flat < est.values.size(); ++flat) {
    for (std::size_t d = 0; d < dim; ++d) {
      text += fmt17(est.axes[d][idx[d]]);
      text += ',';
    }
    text += fmt17(est.values[flat]);
    text += '\n';
    for (std::size_t d = dim; d > 0; --d) {
      if (++idx[d - 1] < est.axes[d - 1].size())
        break;
      idx[d - 1] = 0;
    }
  }
  write_file(path, text);
}

std::string format_report(const ComparisonReport& r)
{
  std::ostringstream os;
  os << "First-passage-time simulation report\n";
  os << "runs per engine: " << r.n_runs << "\n";
  if (r.cmc_dt)
    os << "cmc step: " << shortest(*r.cmc_dt) << "\n";
  os << "\n";

  os << std::left << std::setw(8) << "engine";
  for (std::size_t i = 0; i < r.m; ++i)
    os << std::setw(14) << ("h_opt X" + std::to_string(i + 1));
  for (std::size_t i = 0; i < r.m; ++i)
    os << std::setw(14) << ("P(cross) X" + std::to_string(i + 1));
  os << "CPU time per run (s)\n";
  for (const auto* e : {r.cmc ? &*r.cmc : nullptr, r.unif ? &*r.unif : nullptr}) {
    if (!e)
      continue;
    os << std::setw(8) << e->name;
    for (double h : e->bandwidths)
      os << std::setw(14) << fixed6(h);
    for (double p : e->crossing_probability)
      os << std::setw(14) << fixed6(p);
    os << general6(e->seconds_per_run) << "\n";
  }
  if (r.speedup)
    os << "\nspeedup (cmc/unif): " << fixed6(*r.speedup) << "\n";
  for (std::size_t i = 0; i < r.l1_distance.size(); ++i)
    os << "normalized L1 (unif vs cmc) X" << i + 1 << ": " << fixed6(r.l1_distance[i]) << "\n";

  os << "\n[results]\n";
  os << "m = " << r.m << "\n";
  os << "runs = " << r.n_runs << "\n";
  if (r.cmc_dt)
    os << "cmc.dt = " << shortest(*r.cmc_dt) << "\n";
  for (const auto* e : {r.unif ? &*r.unif : nullptr, r.cmc ? &*r.cmc : nullptr}) {
    if (!e)
      continue;
    for (std::size_t i = 0; i < e->bandwidths.size(); ++i) {
      const std::string k = e->name + ".x" + std::to_string(i + 1);
      os << k << ".h_opt = " << shortest(e->bandwidths[i]) << "\n";
      os << k << ".crossing_probability = " << shortest(e->crossing_probability[i]) << "\n";
      os << k << ".samples = " << e->sample_counts[i] << "\n";
    }
    os << e->name << ".joint.h_opt = " << shortest(e->joint_bandwidth) << "\n";
    os << e->name << ".joint.samples = " << e->joint_samples << "\n";
    os << e->name << ".seconds_per_run = " << shortest(e->seconds_per_run) << "\n";
  }
  if (r.speedup)
    os << "speedup = " << shortest(*r.speedup) << "\n";
  for (std::size_t i = 0; i < r.l1_distance.size(); ++i)
    os << "l1.x" << i + 1 << " = " << shortest(r.l1_distance[i]) << "\n";
  return os.str();
}

ComparisonReport run_experiment(const ExperimentConfig& cfg)
{
  cfg.validate();
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error(dir.string() + ": cannot create output directory: " + ec.message());

  const DensityOptions opts{cfg.spec.horizon, cfg.grid_points, cfg.joint_grid_points};
  ComparisonReport report;
  report.m = cfg.spec.m;
  report.n_runs = cfg.n_runs;

  std::optional<DensitySet> unif_set, cmc_set;
  if (cfg.engine != EngineChoice::cmc) {
    const EngineResult res = run_engine(cfg.spec, cfg.n_runs, cfg.seed, cfg.workers);
    unif_set = estimate_densities(res, opts);
    report.unif = summarize("unif", res, *unif_set);
    write_densities(dir, "unif", *unif_set);
  }
  if (cfg.uses_cmc()) {
    report.cmc_dt = cfg.dt;
    const EngineResult res = run_cmc(cfg.spec, CmcConfig{*cfg.dt, cfg.n_runs, cfg.seed, cfg.workers});
    cmc_set = estimate_densities(res, opts);
    report.cmc = summarize("cmc", res, *cmc_set);
    write_densities(dir, "cmc", *cmc_set);
  }
  if (report.unif && report.cmc) {
    report.speedup = report.cmc->seconds_per_run / report.unif->seconds_per_run;
    for (std::size_t i = 0; i < cfg.spec.m; ++i)
      report.l1_distance.push_back(cmc_set->marginals[i].total_mass > 0.0
                                       ? normalized_l1(unif_set->marginals[i], cmc_set->marginals[i])
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  write_file(dir / "report.txt", format_report(report));
  return report;
}

}  // namespace fptmc
