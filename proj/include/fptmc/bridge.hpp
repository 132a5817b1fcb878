#pragma once

#include "fptmc/model.hpp"
#include "fptmc/random.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace fptmc {

/// One interjump interval of a single component: the diffusion between
/// t_start and t_end is a Brownian bridge pinned at x_start and x_end,
/// observed against a barrier held at a constant level.
struct BridgeSegment
{
  double x_start = 0.0;
  double x_end = 0.0;
  double t_start = 0.0;
  double t_end = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  double level = 0.0;

  double duration() const { return t_end - t_start; }
};

/// Builds a segment for [t_start, t_end] with the barrier frozen at the
/// interval midpoint. This is the only place the linear barrier is reduced
/// to a level.
BridgeSegment make_segment(double x_start, double x_end, double t_start, double t_end,
                           double mu, double sigma, const LinearBarrier& barrier);

/// Above this survival probability the interior crossing is treated as impossible.
inline constexpr double kSurvivalCutoff = 1.0 - 1e-12;

struct CrossingDraw
{
  bool crossed = false;
  double s = 0.0;
  double weight = 0.0;
};

/// Probability that the bridge stays strictly above the level.
double survival_probability(const BridgeSegment& seg);

/// Conditional density of the first crossing at time t inside the open
/// interval, given both endpoints. Integrates to 1 - survival_probability.
/// Throws std::domain_error unless t_start < t < t_end.
double interjump_fpt_density(const BridgeSegment& seg, double t);

/// Same density parameterised by the time elapsed since t_start. Accurate
/// for elapsed times far below the rounding granularity of t_start.
double interjump_fpt_density_elapsed(const BridgeSegment& seg, double elapsed);

/// Uniform proposal s = t_start + b u, b = tau / (1 - P), accepted iff s < t_end.
/// Accepted draws carry the importance weight b g(s), which may underflow
/// to zero where the density is negligible.
CrossingDraw sample_crossing(const BridgeSegment& seg, Rng& rng);

/// 1-based index of the first jump whose post-jump value is at or below the
/// barrier while every earlier pre- and post-jump value stayed above it.
/// Barriers are evaluated at the jump instants.
std::optional<std::size_t> first_jump_crossing(const JumpTimeline& timeline,
                                               std::span<const LinearBarrier> barriers,
                                               std::size_t i);

}  // namespace fptmc
