#include "fptmc/bridge.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fptmc {

BridgeSegment make_segment(double x_start, double x_end, double t_start, double t_end,
                           double mu, double sigma, const LinearBarrier& barrier)
{
  return BridgeSegment{x_start, x_end, t_start, t_end, mu, sigma,
                       barrier_at(barrier, 0.5 * (t_start + t_end))};
}

double survival_probability(const BridgeSegment& seg)
{
  const double above_end = seg.x_end - seg.level;
  if (!(above_end > 0.0))
    return 0.0;
  const double above_start = seg.x_start - seg.level;
  if (!(above_start > 0.0))
    return 0.0;
  const double var = seg.duration() * seg.sigma * seg.sigma;
  return -std::expm1(-2.0 * above_start * above_end / var);
}

double interjump_fpt_density_elapsed(const BridgeSegment& seg, double elapsed)
{
  const double tau = seg.duration();
  const double remaining = tau - elapsed;
  const double s2 = seg.sigma * seg.sigma;
  const double a = seg.x_start - seg.level;  // distance above the level at the start
  const double e = seg.x_end - seg.level;

  // Hitting density of the level at `elapsed`, times the Gaussian transition
  // from the level to x_end, over the unconditional endpoint density.
  const double hit = a + seg.mu * elapsed;
  const double leave = e - seg.mu * remaining;
  const double free = seg.x_start - seg.x_end + seg.mu * tau;
  const double exponent = -leave * leave / (2.0 * remaining * s2) - hit * hit / (2.0 * elapsed * s2)
                          + free * free / (2.0 * tau * s2);
  if (!(a > 0.0) || !(elapsed > 0.0) || !(remaining > 0.0))
    return 0.0;
  // 1/y folded in: y = exp(-free^2 / (2 tau s2)) / (sigma sqrt(2 pi tau)).
  // Assembled in logs so that elapsed^-1.5 cannot overflow ahead of the exponential.
  const double log_prefactor = std::log(a * std::sqrt(2.0 * std::numbers::pi * tau)
                                        / (2.0 * std::numbers::pi * seg.sigma));
  return std::exp(log_prefactor - 1.5 * std::log(elapsed) - 0.5 * std::log(remaining) + exponent);
}

double interjump_fpt_density(const BridgeSegment& seg, double t)
{
  if (!(t > seg.t_start && t < seg.t_end))
    throw std::domain_error("interjump_fpt_density: t must lie strictly inside the interval");
  return interjump_fpt_density_elapsed(seg, t - seg.t_start);
}

CrossingDraw sample_crossing(const BridgeSegment& seg, Rng& rng)
{
  const double p = survival_probability(seg);
  if (p >= kSurvivalCutoff)
    return {};
  const double tau = seg.duration();
  const double b = tau / (1.0 - p);
  const double elapsed = b * uniform_open(rng);
  if (!(elapsed < tau))
    return {};
  const double s = seg.t_start + elapsed;
  return {true, s, b * interjump_fpt_density_elapsed(seg, elapsed)};
}

std::optional<std::size_t> first_jump_crossing(const JumpTimeline& timeline,
                                               std::span<const LinearBarrier> barriers,
                                               std::size_t i)
{
  const std::size_t jumps = timeline.jump_count();
  for (std::size_t j = 1; j <= jumps; ++j) {
    const double level = barrier_at(barriers[i], timeline.instants[j]);
    if (!(timeline.pre(i, j) > level))
      return std::nullopt;
    if (!(timeline.post(i, j) > level))
      return j;
  }
  return std::nullopt;
}

}  // namespace fptmc
