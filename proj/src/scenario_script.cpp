#include "adaptloop/scenario_script.hpp"

#include <set>

#include "adaptloop/error.hpp"

namespace adaptloop {

void ScenarioScript::validate() const {
  if (segments.empty()) throw ParameterError("scenario '" + name + "' has no segments");
  std::set<std::string> labels;
  for (const auto& seg : segments) {
    if (seg.duration < 1) throw ParameterError("segment '" + seg.label + "' has non-positive duration");
    if (!labels.insert(seg.label).second) {
      throw ParameterError("duplicate segment label '" + seg.label + "'");
    }
    if (seg.presentations < 0 || seg.presentation_interval < 1) {
      throw ParameterError("segment '" + seg.label + "' has an invalid presentation schedule");
    }
    adaptloop::validate(seg.environment);
  }
}

long ScenarioScript::total_steps() const {
  long total = 0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

std::size_t ScenarioScript::segment_index(long step) const {
  long start = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    start += segments[i].duration;
    if (step < start) return i;
  }
  return segments.size() - 1;
}

long ScenarioScript::segment_start(std::size_t index) const {
  long start = 0;
  for (std::size_t i = 0; i < index && i < segments.size(); ++i) start += segments[i].duration;
  return start;
}

const Environment& ScenarioScript::environment_at(long step) const {
  return segments.at(segment_index(step)).environment;
}

bool ScenarioScript::presentation_at(long step, Presentation* out) const {
  if (step >= total_steps()) return false;
  const std::size_t idx = segment_index(step);
  const ScenarioSegment& seg = segments[idx];
  const long local = step - segment_start(idx);
  if (local % seg.presentation_interval != 0) return false;
  if (local / seg.presentation_interval >= seg.presentations) return false;
  if (out != nullptr) out->fearful = seg.fearful;
  return true;
}

ScenarioScript constant_scenario(const Environment& env, long steps, std::string name) {
  if (steps < 1) throw ParameterError("constant scenario needs at least one step");
  ScenarioScript s;
  s.name = std::move(name);
  ScenarioSegment seg;
  seg.duration = static_cast<int>(steps);
  seg.environment = env;
  seg.label = "constant";
  s.segments.push_back(seg);
  return s;
}

}  // namespace adaptloop
