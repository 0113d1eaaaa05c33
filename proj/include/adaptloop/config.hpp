#pragma once

#include <cstdint>
#include <string>

#include "adaptloop/error.hpp"
#include "adaptloop/mitigation.hpp"
#include "adaptloop/scenarios.hpp"

namespace adaptloop {

inline constexpr int kConfigFormatVersion = 1;

// Syntax errors carry a 1-based line/column; domain errors carry the dotted key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::string key, int line = 0, int column = 0)
      : Error(msg), key_(std::move(key)), line_(line), column_(column) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

struct ScenarioSelection {
  // constant | nonstationary | four_step | practice | practice_nonstationary
  std::string kind = "nonstationary";
  Environment environment;  // used by "constant"
  double volatility = 0.5;
  NonstationaryParams nonstationary;  // length follows RunConfig::steps
  int ensemble_index = 0;
};

struct CompareSettings {
  int ensemble = 100;
  int bootstrap_resamples = 1000;
  int workers = 0;
  bool write_traces = false;
};

struct RunConfig {
  int format_version = kConfigFormatVersion;
  std::uint64_t seed = 20240601;
  long steps = 1000;
  double dt = 0.1;
  std::string output_dir = "out";
  std::string controller = "landscape";  // threshold | landscape | passive
  SimulationSetup setup;
  ThresholdConfig threshold;
  LandscapeGuidedConfig landscape_controller;
  ScenarioSelection scenario;
  FourStepCalibration four_step;
  PracticeParams practice;
  CompareSettings compare;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Re-checks every bound; parse_config calls this before returning.
void validate(const RunConfig& config);

ControllerConfig controller_by_name(const RunConfig& config, const std::string& name);

// Scenario script selected by config.scenario for a single `simulate` run.
ScenarioScript selected_scenario(const RunConfig& config);

// The comparison ensemble: `count` nonstationary scripts of config.steps length.
std::vector<ScenarioScript> comparison_ensemble(const RunConfig& config, int count);

}  // namespace adaptloop
