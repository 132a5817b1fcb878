#include "fptmc/config.hpp"

#include "fptmc/engine_cmc.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fptmc {

namespace {

struct Entry
{
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader
{
public:
  Reader(std::map<std::string, Entry> entries, std::string source)
    : entries_(std::move(entries)), source_(std::move(source))
  {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const
  {
    std::ostringstream os;
    os << source_;
    if (auto it = entries_.find(key); it != entries_.end())
      os << ":" << it->second.line;
    os << ": " << key << ": " << what;
    throw ConfigError(os.str());
  }

  const std::string& raw(const std::string& key) const
  {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError(source_ + ": missing required field '" + key + "'");
    return it->second.value;
  }

  double number(const std::string& key, const std::string& token) const
  {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
      fail(key, "'" + token + "' is not a finite number");
    return v;
  }

  double real(const std::string& key) const { return number(key, raw(key)); }

  std::uint64_t count(const std::string& key) const
  {
    const std::string& token = raw(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail(key, "'" + token + "' is not a nonnegative integer");
    return v;
  }

  std::vector<double> vector(const std::string& key) const { return row(key, raw(key)); }

  std::vector<std::vector<double>> matrix(const std::string& key) const
  {
    std::vector<std::vector<double>> rows;
    std::istringstream is(raw(key));
    std::string part;
    while (std::getline(is, part, ';'))
      rows.push_back(row(key, part));
    return rows;
  }

  std::vector<std::string> unknown(const std::set<std::string>& known) const
  {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_)
      if (!known.count(k))
        out.push_back(k);
    return out;
  }

private:
  std::vector<double> row(const std::string& key, const std::string& text) const
  {
    std::vector<double> out;
    std::istringstream is(text);
    std::string token;
    while (is >> token)
      out.push_back(number(key, token));
    return out;
  }

  std::map<std::string, Entry> entries_;
  std::string source_;
};

const std::set<std::string> kKnownKeys = {
    "m",      "x0",   "mu",   "sigma",   "lambda",      "jump_mean",         "jump_sd",
    "barrier_intercept",      "barrier_slope",          "horizon", "engine", "runs",
    "dt",     "seed", "workers", "grid_points", "joint_grid_points", "out"};

std::string format_real(double v)
{
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_row(const std::vector<double>& v)
{
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k)
      out += ' ';
    out += format_real(v[k]);
  }
  return out;
}

}  // namespace

std::string to_string(EngineChoice e)
{
  switch (e) {
  case EngineChoice::unif:
    return "unif";
  case EngineChoice::cmc:
    return "cmc";
  case EngineChoice::both:
    return "both";
  }
  return "unif";
}

EngineChoice parse_engine(const std::string& s)
{
  if (s == "unif")
    return EngineChoice::unif;
  if (s == "cmc")
    return EngineChoice::cmc;
  if (s == "both")
    return EngineChoice::both;
  throw ConfigError("engine must be one of unif, cmc, both (got '" + s + "')");
}

void ExperimentConfig::validate() const
{
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_runs == 0)
    throw ConfigError("runs must be at least 1");
  if (workers == 0)
    throw ConfigError("workers must be at least 1");
  if (grid_points < 2 || joint_grid_points < 2)
    throw ConfigError("grid sizes must be at least 2");
  if (uses_cmc()) {
    if (!dt)
      throw ConfigError("missing required field 'dt' (needed by the cmc engine)");
    if (!(spec.lambda * *dt < 1.0))
      throw ConfigError("lambda * dt must be below 1 (got " + format_real(spec.lambda * *dt) + ")");
    try {
      CmcConfig{*dt, n_runs, seed, workers}.validate(spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source)
{
  std::map<std::string, Entry> entries;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (entries.count(key))
      throw ConfigError(source + ":" + std::to_string(number) + ": duplicate field '" + key + "'");
    entries[key] = Entry{trim(line.substr(eq + 1)), number};
  }

  const Reader r(std::move(entries), source);
  if (auto extra = r.unknown(kKnownKeys); !extra.empty())
    r.fail(extra.front(), "unknown field");

  ExperimentConfig cfg;
  ModelSpec& s = cfg.spec;
  s.m = r.count("m");
  if (s.m == 0)
    r.fail("m", "must be a positive integer");

  auto sized = [&](const std::string& key) {
    auto v = r.vector(key);
    if (v.size() != s.m)
      r.fail(key, "dimension mismatch: " + std::to_string(v.size()) + " entries, expected m = "
                      + std::to_string(s.m));
    return v;
  };
  s.x0 = sized("x0");
  s.mu = sized("mu");
  const auto sigma_rows = r.matrix("sigma");
  if (sigma_rows.size() != s.m)
    r.fail("sigma", "dimension mismatch: " + std::to_string(sigma_rows.size())
                        + " rows, expected m = " + std::to_string(s.m));
  for (std::size_t i = 0; i < sigma_rows.size(); ++i) {
    if (sigma_rows[i].size() != s.m)
      r.fail("sigma", "dimension mismatch: row " + std::to_string(i + 1) + " has "
                          + std::to_string(sigma_rows[i].size()) + " entries, expected m = "
                          + std::to_string(s.m));
    bool any = false;
    for (double v : sigma_rows[i])
      any = any || v != 0.0;
    if (!any)
      r.fail("sigma", "degenerate diffusion row " + std::to_string(i + 1) + " (all zeros)");
  }
  s.sigma = Matrix::from_rows(sigma_rows);
  s.lambda = r.real("lambda");
  if (s.lambda < 0.0)
    r.fail("lambda", "must be nonnegative");
  s.jump_mean = sized("jump_mean");
  s.jump_sd = sized("jump_sd");
  for (double v : s.jump_sd)
    if (v < 0.0)
      r.fail("jump_sd", "must be nonnegative");
  const auto intercept = sized("barrier_intercept");
  const auto slope = sized("barrier_slope");
  for (std::size_t i = 0; i < s.m; ++i)
    s.barrier.push_back({intercept[i], slope[i]});
  s.horizon = r.real("horizon");
  if (!(s.horizon > 0.0))
    r.fail("horizon", "must be positive");
  for (std::size_t i = 0; i < s.m; ++i)
    if (!(s.x0[i] > s.barrier[i].intercept))
      r.fail("x0", "component " + std::to_string(i + 1) + " starts at or below its barrier");

  if (r.has("engine")) {
    try {
      cfg.engine = parse_engine(r.raw("engine"));
    } catch (const ConfigError& e) {
      r.fail("engine", e.what());
    }
  }
  if (r.has("runs"))
    cfg.n_runs = r.count("runs");
  if (r.has("dt")) {
    cfg.dt = r.real("dt");
    if (!(*cfg.dt > 0.0))
      r.fail("dt", "must be positive");
    if (!(s.lambda * *cfg.dt < 1.0))
      r.fail("dt", "lambda * dt must be below 1");
  }
  if (r.has("seed"))
    cfg.seed = r.count("seed");
  if (r.has("workers"))
    cfg.workers = r.count("workers");
  if (r.has("grid_points"))
    cfg.grid_points = r.count("grid_points");
  if (r.has("joint_grid_points"))
    cfg.joint_grid_points = r.count("joint_grid_points");
  if (r.has("out"))
    cfg.out_dir = r.raw("out");

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& cfg)
{
  const ModelSpec& s = cfg.spec;
  std::ostringstream os;
  os << "m = " << s.m << '\n';
  os << "x0 = " << format_row(s.x0) << '\n';
  os << "mu = " << format_row(s.mu) << '\n';
  os << "sigma = ";
  for (std::size_t i = 0; i < s.sigma.rows(); ++i) {
    if (i)
      os << " ; ";
    os << format_row({s.sigma.row(i).begin(), s.sigma.row(i).end()});
  }
  os << '\n';
  os << "lambda = " << format_real(s.lambda) << '\n';
  os << "jump_mean = " << format_row(s.jump_mean) << '\n';
  os << "jump_sd = " << format_row(s.jump_sd) << '\n';
  std::vector<double> intercept, slope;
  for (const auto& b : s.barrier) {
    intercept.push_back(b.intercept);
    slope.push_back(b.slope);
  }
  os << "barrier_intercept = " << format_row(intercept) << '\n';
  os << "barrier_slope = " << format_row(slope) << '\n';
  os << "horizon = " << format_real(s.horizon) << '\n';
  os << "engine = " << to_string(cfg.engine) << '\n';
  os << "runs = " << cfg.n_runs << '\n';
  if (cfg.dt)
    os << "dt = " << format_real(*cfg.dt) << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "workers = " << cfg.workers << '\n';
  os << "grid_points = " << cfg.grid_points << '\n';
  os << "joint_grid_points = " << cfg.joint_grid_points << '\n';
  os << "out = " << cfg.out_dir << '\n';
  return os.str();
}

}  // namespace fptmc
