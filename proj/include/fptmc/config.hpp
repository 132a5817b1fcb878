#pragma once

#include "fptmc/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace fptmc {

enum class EngineChoice
{
  unif,
  cmc,
  both,
};

std::string to_string(EngineChoice e);
EngineChoice parse_engine(const std::string& s);

struct ExperimentConfig
{
  ModelSpec spec;
  EngineChoice engine = EngineChoice::unif;
  std::size_t n_runs = 100000;
  std::optional<double> dt;  // required for cmc and both
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t grid_points = 512;
  std::size_t joint_grid_points = 128;
  std::string out_dir = "out";

  bool uses_cmc() const { return engine != EngineChoice::unif; }

  /// Checks the model and engine fields; throws ConfigError.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Configuration problem; the message carries the source and, where known,
/// the line number.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Parses the flat `key = value` format (see docs/config-format.md).
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Writes every field back in the same format; parse_config_text inverts it.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace fptmc
