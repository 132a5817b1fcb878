#pragma once

#include "fptmc/engine.hpp"
#include "fptmc/model.hpp"

#include <cstdint>
#include <memory>

namespace fptmc {

/// Uniform-sampling first-passage simulator. The process is only drawn at
/// the jump instants; between jumps each component is a Brownian bridge and
/// its interior crossing time is proposed uniformly and importance weighted.
class UnifSimulator
{
public:
  explicit UnifSimulator(const ModelSpec& spec);
  UnifSimulator(const ModelSpec& spec, std::shared_ptr<const JumpSizeLaw> law);

  /// One Monte Carlo run on a freshly drawn timeline.
  void run(Rng& rng, RunOutcome& out);

  /// Scans a given timeline. Exposed so that fixtures can drive the crossing
  /// logic with hand-built paths.
  void scan(const JumpTimeline& timeline, Rng& rng, RunOutcome& out) const;

  const JumpTimeline& last_timeline() const { return timeline_; }

private:
  const ModelSpec* spec_;
  std::shared_ptr<const JumpSizeLaw> law_;
  std::vector<double> sigma_eff_;
  JumpTimeline timeline_;
};

RunOutcome run_single(const ModelSpec& spec, Rng& rng);

EngineResult run_engine(const ModelSpec& spec, std::size_t n_runs, std::uint64_t seed,
                        std::size_t workers = 1);

}  // namespace fptmc
