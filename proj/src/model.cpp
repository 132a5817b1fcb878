#include "fptmc/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fptmc {

namespace {

[[noreturn]] void fail(const std::string& what)
{
  throw std::invalid_argument(what);
}

void check_length(const char* name, std::size_t got, std::size_t m)
{
  if (got != m) {
    std::ostringstream os;
    os << "dimension mismatch: " << name << " has " << got << " entries, expected m = " << m;
    fail(os.str());
  }
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows)
{
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix out(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c)
      fail("ragged matrix: row " + std::to_string(i) + " has " + std::to_string(rows[i].size())
           + " entries, expected " + std::to_string(c));
    for (std::size_t j = 0; j < c; ++j)
      out(i, j) = rows[i][j];
  }
  return out;
}

Matrix Matrix::identity(std::size_t n, double scale)
{
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    out(i, i) = scale;
  return out;
}

double barrier_at(const LinearBarrier& b, double t)
{
  return b.intercept + b.slope * t;
}

void ModelSpec::validate(bool require_diffusion) const
{
  if (m == 0)
    fail("m must be a positive integer");
  check_length("x0", x0.size(), m);
  check_length("mu", mu.size(), m);
  check_length("sigma rows", sigma.rows(), m);
  check_length("sigma columns", sigma.cols(), m);
  check_length("jump_mean", jump_mean.size(), m);
  check_length("jump_sd", jump_sd.size(), m);
  check_length("barrier", barrier.size(), m);

  if (!std::isfinite(horizon) || horizon <= 0.0)
    fail("horizon must be positive");
  if (!std::isfinite(lambda) || lambda < 0.0)
    fail("lambda must be nonnegative");

  for (std::size_t i = 0; i < m; ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    if (!std::isfinite(x0[i]) || !std::isfinite(mu[i]) || !std::isfinite(jump_mean[i]))
      fail("non-finite value in x0/mu/jump_mean" + idx);
    if (!std::isfinite(jump_sd[i]) || jump_sd[i] < 0.0)
      fail("jump_sd" + idx + " must be finite and nonnegative");
    if (!std::isfinite(barrier[i].intercept) || !std::isfinite(barrier[i].slope))
      fail("barrier" + idx + " must be finite");
    for (std::size_t k = 0; k < m; ++k)
      if (!std::isfinite(sigma(i, k)))
        fail("sigma" + idx + " has a non-finite entry");
    bool any = false;
    for (double v : sigma.row(i))
      any = any || v != 0.0;
    if (!any && require_diffusion)
      fail("degenerate diffusion row: sigma" + idx + " is all zeros");
    if (!(x0[i] > barrier_at(barrier[i], 0.0)))
      fail("x0" + idx + " must start strictly above its barrier at t = 0");
  }
}

ModelSpec reference_example(double lambda)
{
  ModelSpec s;
  s.m = 2;
  s.x0 = {0.0, 0.0};
  s.mu = {-0.002, -0.012};
  s.sigma = Matrix::identity(2, 0.2);
  s.lambda = lambda;
  s.jump_mean = {0.0, 0.0};
  s.jump_sd = {0.2, 0.12};
  s.barrier = {{std::log(0.9), -0.002}, {std::log(0.95), -0.012}};
  s.horizon = 1.0;
  return s;
}

NormalJumpLaw::NormalJumpLaw(std::vector<double> mean, std::vector<double> sd)
  : mean_(std::move(mean)), sd_(std::move(sd))
{
  if (mean_.size() != sd_.size())
    fail("jump law: mean and sd lengths differ");
}

double NormalJumpLaw::draw(std::size_t i, Rng& rng) const
{
  if (sd_[i] == 0.0)
    return mean_[i];
  std::normal_distribution<double> dist(mean_[i], sd_[i]);
  return dist(rng);
}

double effective_sigma(const Matrix& sigma, std::size_t i)
{
  if (i >= sigma.rows())
    throw std::out_of_range("effective_sigma: row " + std::to_string(i) + " out of range");
  double ss = 0.0;
  for (double v : sigma.row(i))
    ss += v * v;
  if (ss == 0.0)
    fail("degenerate diffusion row: sigma[" + std::to_string(i) + "] is all zeros");
  return std::sqrt(ss);
}

std::vector<double> sample_jump_instants(double lambda, double horizon, Rng& rng)
{
  if (lambda < 0.0 || !(horizon > 0.0))
    fail("sample_jump_instants: need lambda >= 0 and horizon > 0");
  std::vector<double> out;
  if (lambda == 0.0)
    return out;
  std::exponential_distribution<double> gap(lambda);
  double t = gap(rng);
  while (t < horizon) {
    if (t > 0.0 && (out.empty() || t > out.back()))
      out.push_back(t);
    t += gap(rng);
  }
  return out;
}

void propagate_interjump_inplace(std::span<double> state, double dt, const ModelSpec& spec,
                                 std::span<double> scratch, Rng& rng)
{
  const std::size_t m = spec.m;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(dt);
  for (std::size_t k = 0; k < m; ++k)
    scratch[k] = sd * normal(rng);
  for (std::size_t i = 0; i < m; ++i) {
    double x = state[i] + spec.mu[i] * dt;
    for (std::size_t k = 0; k < m; ++k)
      x += spec.sigma(i, k) * scratch[k];
    state[i] = x;
  }
}

std::vector<double> propagate_interjump(std::span<const double> state, double dt,
                                        const ModelSpec& spec, Rng& rng)
{
  if (!(dt > 0.0))
    fail("propagate_interjump: dt must be positive");
  std::vector<double> out(state.begin(), state.end());
  std::vector<double> scratch(spec.m);
  propagate_interjump_inplace(out, dt, spec, scratch, rng);
  return out;
}

std::vector<double> apply_jump(std::span<const double> state, const JumpSizeLaw& law, Rng& rng)
{
  std::vector<double> out(state.begin(), state.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += law.draw(i, rng);
  return out;
}

std::vector<double> apply_jump(std::span<const double> state, const ModelSpec& spec, Rng& rng)
{
  return apply_jump(state, NormalJumpLaw(spec), rng);
}

void build_timeline(const ModelSpec& spec, const JumpSizeLaw& law, Rng& rng, JumpTimeline& out)
{
  const std::size_t m = spec.m;
  out.m = m;
  out.instants.clear();
  out.instants.push_back(0.0);
  if (spec.lambda > 0.0) {
    std::exponential_distribution<double> gap(spec.lambda);
    double t = gap(rng);
    while (t < spec.horizon) {
      if (t > out.instants.back())
        out.instants.push_back(t);
      t += gap(rng);
    }
  }
  out.instants.push_back(spec.horizon);

  const std::size_t jumps = out.instants.size() - 2;
  out.pre_jump.resize((jumps + 1) * m);
  out.post_jump.resize(jumps * m);

  double scratch_buf[16];
  std::vector<double> scratch_vec;
  std::span<double> scratch;
  if (m <= 16) {
    scratch = std::span<double>(scratch_buf, m);
  } else {
    scratch_vec.resize(m);
    scratch = scratch_vec;
  }

  // Propagate each interjump gap from the previous post-jump column.
  const double* from = spec.x0.data();
  for (std::size_t j = 0; j <= jumps; ++j) {
    std::span<double> col(out.pre_jump.data() + j * m, m);
    std::copy(from, from + m, col.begin());
    propagate_interjump_inplace(col, out.instants[j + 1] - out.instants[j], spec, scratch, rng);
    if (j == jumps)
      break;
    double* post = out.post_jump.data() + j * m;
    for (std::size_t i = 0; i < m; ++i)
      post[i] = col[i] + law.draw(i, rng);
    from = post;
  }
}

JumpTimeline build_timeline(const ModelSpec& spec, Rng& rng)
{
  JumpTimeline out;
  build_timeline(spec, NormalJumpLaw(spec), rng, out);
  return out;
}

}  // namespace fptmc
