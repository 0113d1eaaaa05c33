#pragma once

#include <map>
#include <string>
#include <vector>

#include "adaptloop/physiology.hpp"

namespace adaptloop {

struct ScenarioSegment {
  int duration = 1;  // steps
  Environment environment;
  std::string label;
  // Stimulus presentations consolidated into memory, one every
  // `presentation_interval` steps starting at the segment's first step.
  int presentations = 0;
  int presentation_interval = 1;
  bool fearful = false;
};

// Piecewise-constant environment schedule. Steps past the end hold the last
// segment.
struct ScenarioScript {
  std::string name;
  std::vector<ScenarioSegment> segments;
  std::map<std::string, double> calibration;

  // Throws ParameterError on empty scripts, non-positive durations or
  // duplicate labels.
  void validate() const;
  long total_steps() const;
  std::size_t segment_index(long step) const;
  long segment_start(std::size_t index) const;
  const Environment& environment_at(long step) const;
  // Presentation scheduled at this step, if any.
  bool presentation_at(long step, Presentation* out) const;
};

ScenarioScript constant_scenario(const Environment& env, long steps, std::string name = "constant");

}  // namespace adaptloop
