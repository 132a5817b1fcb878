#include "fptmc/engine_cmc.hpp"

#include <cmath>
#include <stdexcept>

namespace fptmc {

void CmcConfig::validate(const ModelSpec& spec) const
{
  if (!(dt > 0.0))
    throw std::invalid_argument("cmc: dt must be positive");
  if (dt > spec.horizon)
    throw std::invalid_argument("cmc: dt must not exceed the horizon");
  if (!(spec.lambda * dt < 1.0))
    throw std::invalid_argument("cmc: lambda * dt must be below 1 for Bernoulli jump arrivals");
  if (n_runs == 0)
    throw std::invalid_argument("cmc: n_runs must be at least 1");
  if (workers == 0)
    throw std::invalid_argument("cmc: workers must be at least 1");
}

std::size_t cmc_step_count(double horizon, double dt)
{
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * ratio)
    return static_cast<std::size_t>(std::max(nearest, 1.0));
  return static_cast<std::size_t>(std::ceil(ratio));
}

CmcSimulator::CmcSimulator(const ModelSpec& spec, const CmcConfig& cfg)
  : CmcSimulator(spec, cfg, std::make_shared<NormalJumpLaw>(spec))
{}

CmcSimulator::CmcSimulator(const ModelSpec& spec, const CmcConfig& cfg,
                           std::shared_ptr<const JumpSizeLaw> law)
  : spec_(&spec), law_(std::move(law))
{
  spec.validate(false);
  cfg.validate(spec);
  const std::size_t m = spec.m;
  steps_ = cmc_step_count(spec.horizon, cfg.dt);
  step_ = spec.horizon / static_cast<double>(steps_);
  jump_prob_ = spec.lambda * step_;
  const double root = std::sqrt(step_);
  for (std::size_t i = 0; i < m; ++i) {
    drift_step_.push_back(spec.mu[i] * step_);
    for (std::size_t k = 0; k < m; ++k)
      sigma_step_.push_back(spec.sigma(i, k) * root);
  }
  state_.resize(m);
  noise_.resize(m);
}

void CmcSimulator::run(Rng& rng, RunOutcome& out)
{
  const ModelSpec& spec = *spec_;
  const std::size_t m = spec.m;
  out.crossings.assign(m, std::nullopt);
  std::copy(spec.x0.begin(), spec.x0.end(), state_.begin());
  normal_.reset();

  std::size_t remaining = m;
  for (std::size_t k = 1; k <= steps_ && remaining > 0; ++k) {
    for (std::size_t c = 0; c < m; ++c)
      noise_[c] = normal_(rng);
    for (std::size_t i = 0; i < m; ++i) {
      double dx = drift_step_[i];
      for (std::size_t c = 0; c < m; ++c)
        dx += sigma_step_[i * m + c] * noise_[c];
      state_[i] += dx;
    }
    if (jump_prob_ > 0.0 && uniform_open(rng) < jump_prob_) {
      ++out.jumps;
      for (std::size_t i = 0; i < m; ++i)
        state_[i] += law_->draw(i, rng);
    }
    const double t = k == steps_ ? spec.horizon : step_ * static_cast<double>(k);
    for (std::size_t i = 0; i < m; ++i) {
      if (out.crossings[i])
        continue;
      if (!(state_[i] > barrier_at(spec.barrier[i], t))) {
        out.crossings[i] = FptSample{t, 1.0, CrossingKind::interior};
        --remaining;
      }
    }
  }
}

RunOutcome run_cmc_single(const ModelSpec& spec, const CmcConfig& cfg, Rng& rng)
{
  CmcSimulator sim(spec, cfg);
  RunOutcome out;
  out.reset(spec.m);
  sim.run(rng, out);
  return out;
}

EngineResult run_cmc(const ModelSpec& spec, const CmcConfig& cfg)
{
  spec.validate(false);
  cfg.validate(spec);
  return run_chunked(spec.m, cfg.n_runs, cfg.seed, cfg.workers, [&spec, &cfg]() -> RunFunction {
    auto sim = std::make_shared<CmcSimulator>(spec, cfg);
    return [sim](Rng& rng, RunOutcome& out) { sim->run(rng, out); };
  });
}

}  // namespace fptmc
