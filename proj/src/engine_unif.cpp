#include "fptmc/engine_unif.hpp"

#include "fptmc/bridge.hpp"

namespace fptmc {

UnifSimulator::UnifSimulator(const ModelSpec& spec)
  : UnifSimulator(spec, std::make_shared<NormalJumpLaw>(spec))
{}

UnifSimulator::UnifSimulator(const ModelSpec& spec, std::shared_ptr<const JumpSizeLaw> law)
  : spec_(&spec), law_(std::move(law))
{
  spec.validate();
  for (std::size_t i = 0; i < spec.m; ++i)
    sigma_eff_.push_back(effective_sigma(spec.sigma, i));
}

void UnifSimulator::run(Rng& rng, RunOutcome& out)
{
  build_timeline(*spec_, *law_, rng, timeline_);
  scan(timeline_, rng, out);
}

void UnifSimulator::scan(const JumpTimeline& tl, Rng& rng, RunOutcome& out) const
{
  const ModelSpec& spec = *spec_;
  const std::size_t m = spec.m;
  const std::size_t jumps = tl.jump_count();
  out.crossings.assign(m, std::nullopt);
  out.jumps = jumps;

  std::size_t remaining = m;
  for (std::size_t j = 1; j <= jumps + 1 && remaining > 0; ++j) {
    const double t0 = tl.instants[j - 1];
    const double t1 = tl.instants[j];
    for (std::size_t i = 0; i < m; ++i) {
      if (out.crossings[i])
        continue;
      const double x_start = j == 1 ? spec.x0[i] : tl.post(i, j - 1);
      const BridgeSegment seg =
          make_segment(x_start, tl.pre(i, j), t0, t1, spec.mu[i], sigma_eff_[i], spec.barrier[i]);

      if (!(seg.x_start > seg.level)) {
        // Entered the interval on or under the frozen level: count it as a
        // crossing at the left endpoint.
        out.crossings[i] = FptSample{t0, 1.0, CrossingKind::at_jump};
        ++out.grazing;
        --remaining;
        continue;
      }

      const CrossingDraw draw = sample_crossing(seg, rng);
      if (draw.crossed) {
        out.crossings[i] = FptSample{draw.s, draw.weight, CrossingKind::interior};
        --remaining;
        continue;
      }

      if (j <= jumps) {
        const double level = barrier_at(spec.barrier[i], t1);
        if (tl.pre(i, j) > level && !(tl.post(i, j) > level)) {
          out.crossings[i] = FptSample{t1, 1.0, CrossingKind::at_jump};
          --remaining;
        }
      }
    }
  }
}

RunOutcome run_single(const ModelSpec& spec, Rng& rng)
{
  UnifSimulator sim(spec);
  RunOutcome out;
  out.reset(spec.m);
  sim.run(rng, out);
  return out;
}

EngineResult run_engine(const ModelSpec& spec, std::size_t n_runs, std::uint64_t seed,
                        std::size_t workers)
{
  spec.validate();
  return run_chunked(spec.m, n_runs, seed, workers, [&spec]() -> RunFunction {
    auto sim = std::make_shared<UnifSimulator>(spec);
    return [sim](Rng& rng, RunOutcome& out) { sim->run(rng, out); };
  });
}

}  // namespace fptmc
