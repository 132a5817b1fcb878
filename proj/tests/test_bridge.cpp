#include "fptmc/bridge.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fptmc;

namespace {

BridgeSegment unit_segment()
{
  // x_start = x_end = 1, level 0, tau = 1, sigma = 1: P = 1 - e^-2.
  return {1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
}

double quadrature_of_density(const BridgeSegment& seg)
{
  return oracle::integrate(
      [&](double e) { return interjump_fpt_density_elapsed(seg, e); }, 0.0, seg.duration(), 1e-12);
}

}  // namespace

TEST_CASE("survival probability closed cases")
{
  BridgeSegment seg = unit_segment();
  CHECK(survival_probability(seg) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
  CHECK(survival_probability(seg) == doctest::Approx(0.864665).epsilon(1e-6));

  seg.x_end = -0.5;
  CHECK(survival_probability(seg) == 0.0);
  seg.x_end = 0.0;
  CHECK(survival_probability(seg) == 0.0);

  seg = unit_segment();
  seg.x_start = seg.level;
  CHECK(survival_probability(seg) == 0.0);
}

TEST_CASE("survival probability symmetries")
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int k = 0; k < 200; ++k) {
    const BridgeSegment seg{u(rng), u(rng), 0.3, 0.3 + u(rng), u(rng) - 1.0, u(rng), 0.0};
    const double p = survival_probability(seg);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);

    BridgeSegment shifted = seg;
    const double d = u(rng) * 5.0 - 2.5;
    shifted.x_start += d;
    shifted.x_end += d;
    shifted.level += d;
    CHECK(survival_probability(shifted) == doctest::Approx(p).epsilon(1e-9));

    BridgeSegment scaled = seg;
    const double c = u(rng) * 3.0;
    scaled.x_start *= c;
    scaled.x_end *= c;
    scaled.sigma *= c;
    CHECK(survival_probability(scaled) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("survival probability against simulated bridges")
{
  std::mt19937_64 rng(22);
  const BridgeSegment seg = unit_segment();
  const oracle::BridgeMonteCarlo mc{seg.x_start, seg.x_end, seg.level, seg.sigma, seg.duration()};
  const auto r = mc.run(100000, rng);
  const double p = survival_probability(seg);
  MESSAGE("analytic " << p << ", extrapolated brute force " << r.survival << " +- " << r.survival_se
                      << " (raw fine grid " << r.fine_survival << ")");
  CHECK(std::abs(r.survival - p) < 3.0 * r.survival_se);
}

TEST_CASE("density formula matches the ratio construction")
{
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double level = u(rng) - 0.5;
    const double x_start = level + 0.05 + u(rng);
    const double x_end = level + 2.0 * u(rng) - 1.0;
    const double sigma = 0.2 + u(rng);
    const double mu = 0.6 * u(rng) - 0.3;
    const double t0 = u(rng);
    const double tau = 0.1 + u(rng);
    const double elapsed = tau * (0.05 + 0.9 * u(rng));
    const BridgeSegment seg{x_start, x_end, t0, t0 + tau, mu, sigma, level};
    const double ours = interjump_fpt_density_elapsed(seg, elapsed);
    const double ref = oracle::bridge_density_by_ratio(x_start, x_end, level, mu, sigma, tau, elapsed);
    CHECK(ours == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("density integrates to the crossing probability")
{
  SUBCASE("unit segment")
  {
    const BridgeSegment seg = unit_segment();
    CHECK(std::abs(quadrature_of_density(seg) - std::exp(-2.0)) < 1e-3);
  }
  SUBCASE("certain crossing")
  {
    BridgeSegment seg = unit_segment();
    seg.x_end = -0.3;
    CHECK(std::abs(quadrature_of_density(seg) - 1.0) < 1e-3);
  }
  SUBCASE("drift does not change the bridge")
  {
    BridgeSegment a = unit_segment();
    BridgeSegment b = a;
    b.mu = 0.7;
    for (double e : {0.1, 0.3, 0.5, 0.9})
      CHECK(interjump_fpt_density_elapsed(a, e) == doctest::Approx(interjump_fpt_density_elapsed(b, e)).epsilon(1e-12));
  }
  SUBCASE("endpoints are rejected")
  {
    const BridgeSegment seg = unit_segment();
    CHECK_THROWS_AS(interjump_fpt_density(seg, seg.t_start), std::domain_error);
    CHECK_THROWS_AS(interjump_fpt_density(seg, seg.t_end), std::domain_error);
    CHECK(interjump_fpt_density(seg, 0.5) > 0.0);
  }
}

TEST_CASE("crossing-time histogram against simulated bridges")
{
  std::mt19937_64 rng(33);
  const BridgeSegment seg = unit_segment();
  constexpr std::size_t bins = 20;
  oracle::BridgeMonteCarlo mc{seg.x_start, seg.x_end, seg.level, seg.sigma, seg.duration()};
  mc.bins = bins;
  const auto r = mc.run(100000, rng);
  double stat = 0.0;
  int cells = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = seg.duration() * b / bins;
    const double hi = seg.duration() * (b + 1) / bins;
    const double expected = oracle::integrate(
        [&](double e) { return interjump_fpt_density_elapsed(seg, e); }, lo, hi, 1e-12);
    // Usual chi-square rule: leave out cells expecting fewer than 5 crossings.
    if (expected * 100000 < 5.0)
      continue;
    stat += std::pow((r.bin_mass[b] - expected) / r.bin_se[b], 2);
    ++cells;
  }
  REQUIRE(cells >= 15);
  const double p = oracle::chi_square_p(stat, static_cast<double>(cells));
  MESSAGE("histogram chi-square " << stat << ", p = " << p);
  CHECK(p > 0.01);
}

TEST_CASE("uniform crossing sampler")
{
  Rng rng = make_stream(25, 0);

  SUBCASE("certain crossing covers the interval uniformly")
  {
    BridgeSegment seg = unit_segment();
    seg.t_start = 2.0;
    seg.t_end = 2.5;
    seg.x_end = -0.1;
    double sum = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
      const auto d = sample_crossing(seg, rng);
      REQUIRE(d.crossed);
      CHECK(d.s > seg.t_start);
      CHECK(d.s <= seg.t_end);
      CHECK(d.weight >= 0.0);
      sum += d.s;
    }
    // Uniform mean 2.25, sd 0.5/sqrt(12)
    CHECK(std::abs(sum / n - 2.25) < 3.0 * 0.5 / std::sqrt(12.0 * n));
  }
  SUBCASE("acceptance frequency is 1 - P")
  {
    const BridgeSegment seg = unit_segment();
    const int n = 100000;
    int hits = 0;
    for (int k = 0; k < n; ++k)
      hits += sample_crossing(seg, rng).crossed;
    const double q = std::exp(-2.0);
    CHECK(std::abs(static_cast<double>(hits) / n - q) < 3.0 * std::sqrt(q * (1 - q) / n));
  }
  SUBCASE("survival near one short-circuits without drawing")
  {
    BridgeSegment seg = unit_segment();
    seg.x_start = 10.0;
    seg.x_end = 10.0;
    Rng before = rng;
    const auto d = sample_crossing(seg, rng);
    CHECK_FALSE(d.crossed);
    CHECK(before == rng);
  }
  SUBCASE("weighted draws reproduce the density at the midpoint")
  {
    // E[w; s in window] / width -> g(midpoint). Window of width 0.02 around 0.5.
    const BridgeSegment seg = unit_segment();
    const int n = 1000000;
    const double half = 0.01;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto d = sample_crossing(seg, rng);
      if (d.crossed && std::abs(d.s - 0.5) < half)
        acc += d.weight;
    }
    const double estimate = acc / n / (2.0 * half);
    const double window_avg = oracle::integrate(
        [&](double e) { return interjump_fpt_density_elapsed(seg, e); }, 0.5 - half, 0.5 + half) / (2 * half);
    CHECK(estimate == doctest::Approx(window_avg).epsilon(0.05));
    CHECK(window_avg == doctest::Approx(interjump_fpt_density(seg, 0.5)).epsilon(1e-3));
  }
}

TEST_CASE("first jump crossing index")
{
  const std::vector<LinearBarrier> barrier{{0.0, 0.0}};
  JumpTimeline tl;
  tl.m = 1;

  SUBCASE("no jumps")
  {
    tl.instants = {0.0, 1.0};
    tl.pre_jump = {1.0};
    CHECK_FALSE(first_jump_crossing(tl, barrier, 0).has_value());
  }
  SUBCASE("first jump lands below")
  {
    tl.instants = {0.0, 0.4, 1.0};
    tl.pre_jump = {1.0, 1.0};
    tl.post_jump = {-1.0};
    CHECK(first_jump_crossing(tl, barrier, 0) == 1u);
  }
  SUBCASE("second jump lands below")
  {
    tl.instants = {0.0, 0.2, 0.4, 1.0};
    tl.pre_jump = {1.0, 0.5, -2.0};
    tl.post_jump = {0.6, 0.0};
    CHECK(first_jump_crossing(tl, barrier, 0) == 2u);
  }
  SUBCASE("diffusion below before the jump disqualifies")
  {
    tl.instants = {0.0, 0.2, 0.4, 1.0};
    tl.pre_jump = {-0.1, 0.5, 0.5};
    tl.post_jump = {0.6, -1.0};
    CHECK_FALSE(first_jump_crossing(tl, barrier, 0).has_value());
  }
  SUBCASE("sloped barrier is read at the jump instant")
  {
    const std::vector<LinearBarrier> sloped{{0.0, 1.0}};
    tl.instants = {0.0, 0.5, 1.0};
    tl.pre_jump = {0.8, 0.0};
    tl.post_jump = {0.45};  // below D(0.5) = 0.5
    CHECK(first_jump_crossing(tl, sloped, 0) == 1u);
  }
}

TEST_CASE("segment freezes the barrier at the midpoint")
{
  const auto seg = make_segment(1.0, 0.5, 0.2, 0.6, 0.0, 1.0, {0.1, -0.5});
  CHECK(seg.level == doctest::Approx(0.1 - 0.5 * 0.4));
}
