#pragma once

#include "fptmc/engine.hpp"
#include "fptmc/model.hpp"

#include <cstdint>
#include <memory>

namespace fptmc {

struct CmcConfig
{
  double dt = 0.0002;
  std::size_t n_runs = 100000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  /// Throws std::invalid_argument unless 0 < dt <= horizon and lambda dt < 1.
  void validate(const ModelSpec& spec) const;
};

/// Number of Euler steps covering the horizon: T/dt rounded when it is an
/// integer up to 1e-9 relative, otherwise rounded up (and the step shrunk).
std::size_t cmc_step_count(double horizon, double dt);

/// Fixed-step Euler scheme with Bernoulli(lambda dt) jump arrivals per step.
/// Each step adds the diffusion increment, then the jump if one arrives, then
/// compares every still-active component with its barrier at the step end.
class CmcSimulator
{
public:
  CmcSimulator(const ModelSpec& spec, const CmcConfig& cfg);
  CmcSimulator(const ModelSpec& spec, const CmcConfig& cfg, std::shared_ptr<const JumpSizeLaw> law);

  void run(Rng& rng, RunOutcome& out);

private:
  const ModelSpec* spec_;
  std::shared_ptr<const JumpSizeLaw> law_;
  std::size_t steps_ = 0;
  double step_ = 0.0;
  double jump_prob_ = 0.0;
  std::vector<double> drift_step_;   // mu * step
  std::vector<double> sigma_step_;   // sigma * sqrt(step), row-major
  std::vector<double> state_;
  std::vector<double> noise_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

RunOutcome run_cmc_single(const ModelSpec& spec, const CmcConfig& cfg, Rng& rng);

EngineResult run_cmc(const ModelSpec& spec, const CmcConfig& cfg);

}  // namespace fptmc
