#include "adaptloop/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace adaptloop {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

std::string fc_baseline_name(FcBaseline b) {
  return b == FcBaseline::kWindow ? "window" : "fixed_range";
}

// Serializes fields in declaration order.
class Writer {
 public:
  explicit Writer(ordered_json& out) : out_(&out) {}

  template <class T>
  void field(const char* key, const T& value) {
    (*out_)[key] = value;
  }
  void field(const char* key, const Interval& v) { (*out_)[key] = {v.lo, v.hi}; }
  void field(const char* key, const FcBaseline& v) { (*out_)[key] = fc_baseline_name(v); }

  void section(const char* key, const std::function<void(Writer&)>& body) {
    ordered_json child = ordered_json::object();
    Writer w(child);
    body(w);
    (*out_)[key] = std::move(child);
  }

 private:
  ordered_json* out_;
};

// Reads fields, keeps defaults for absent keys and rejects unknown ones.
class Reader {
 public:
  Reader(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ != nullptr && !node_->is_object()) {
      throw ConfigError("'" + (path_.empty() ? std::string("<root>") : path_) +
                            "' must be an object",
                        path_);
    }
  }

  template <class T>
  void field(const char* key, T& value) {
    const json* v = take(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned()) {
            throw std::invalid_argument("expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      } else {
        if (!v->is_array() || v->size() != std::tuple_size_v<T>) {
          throw std::invalid_argument("expected an array of " +
                                      std::to_string(std::tuple_size_v<T>) + " numbers");
        }
        for (const auto& e : *v) {
          if (!e.is_number()) throw std::invalid_argument("expected numeric array entries");
        }
      }
      value = v->get<T>();
    } catch (const std::exception& e) {
      throw ConfigError("'" + join(path_, key) + "': " + e.what(), join(path_, key));
    }
  }

  void field(const char* key, Interval& value) {
    std::array<double, 2> pair{value.lo, value.hi};
    field(key, pair);
    value = {pair[0], pair[1]};
  }

  void field(const char* key, FcBaseline& value) {
    std::string name = fc_baseline_name(value);
    field(key, name);
    if (name == "window") {
      value = FcBaseline::kWindow;
    } else if (name == "fixed_range") {
      value = FcBaseline::kFixedRange;
    } else {
      throw ConfigError("'" + join(path_, key) + "' must be \"window\" or \"fixed_range\"",
                        join(path_, key));
    }
  }

  void section(const char* key, const std::function<void(Reader&)>& body) {
    Reader child(take(key), join(path_, key));
    body(child);
    child.finish();
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, _] : node_->items()) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown key '" + join(path_, key) + "'", join(path_, key));
      }
    }
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class V, class Env>
void environment_fields(V& v, Env& e) {
  v.field("degradation", e.degradation);
  v.field("stimulus_clarity", e.stimulus_clarity);
  v.field("drift_bias", e.drift_bias);
  v.field("noise_scale", e.noise_scale);
}

template <class V, class P>
void nonstationary_fields(V& v, P& p, bool with_length) {
  if (with_length) v.field("length", p.length);
  v.field("switch_rate", p.switch_rate);
  v.field("degradation_center", p.degradation_center);
  v.field("degradation_spread", p.degradation_spread);
  v.field("bias_center", p.bias_center);
  v.field("bias_spread", p.bias_spread);
  v.field("noise_scale", p.noise_scale);
  v.field("stimulus_clarity", p.stimulus_clarity);
}

// Single description of the document layout, shared by reader and writer.
template <class V, class C>
void visit_config(V& v, C& c) {
  using Sub = std::remove_reference_t<V>;
  v.field("format_version", c.format_version);
  v.field("seed", c.seed);
  v.field("steps", c.steps);
  v.field("dt", c.dt);
  v.field("output_dir", c.output_dir);
  v.field("controller", c.controller);
  v.section("landscape", [&](Sub& s) {
    s.field("n", c.setup.landscape.n);
    s.field("k", c.setup.landscape.k);
  });
  v.section("physiology", [&](Sub& s) {
    s.field("initial_indicators", c.setup.physiology.indicators);
    s.field("mu", c.setup.physiology.mu);
    s.field("sigma", c.setup.physiology.sigma);
    s.field("amplitude", c.setup.physiology.amplitude);
    s.field("hysteresis_offset", c.setup.physiology.hysteresis_offset);
    s.field("capacity", c.setup.physiology.capacity);
    s.field("habituation_rates", c.setup.physiology.habituation_rates);
    s.field("reversion_rate", c.setup.physiology.reversion_rate);
  });
  v.section("memory", [&](Sub& s) {
    s.field("alpha_fear", c.setup.memory.alpha_fear);
    s.field("alpha_decl", c.setup.memory.alpha_decl);
    s.field("interference", c.setup.memory.interference);
  });
  v.section("hysteresis", [&](Sub& s) {
    s.field("critical_width", c.setup.engine.hysteresis.critical_width);
    s.field("delta", c.setup.engine.hysteresis.delta);
    s.field("limit", c.setup.engine.hysteresis.limit);
  });
  v.section("ratchet", [&](Sub& s) {
    s.field("threshold", c.setup.engine.ratchet.threshold);
    s.field("widen_fraction", c.setup.engine.ratchet.widen_fraction);
  });
  v.section("assessment", [&](Sub& s) {
    s.field("robust_radius", c.setup.engine.phase.robust_radius);
    s.field("balance_band", c.setup.engine.phase.balance_band);
    s.field("regime_tolerance", c.setup.engine.regime.relative_tolerance);
    s.field("regime_window", c.setup.engine.regime_window);
    s.field("fc_baseline", c.setup.engine.fc_baseline);
    s.field("fc_window", c.setup.engine.fc_window);
    s.field("fc_range", c.setup.engine.fc_range);
  });
  v.section("engine", [&](Sub& s) {
    s.field("optimal_performance", c.setup.engine.optimal_performance);
    s.field("degradation_load", c.setup.engine.degradation_load);
    s.field("learning_gain", c.setup.engine.learning_gain);
    s.field("skill_gain", c.setup.engine.skill_gain);
    s.field("steps_per_walk_move", c.setup.engine.steps_per_walk_move);
  });
  v.section("controllers", [&](Sub& s) {
    s.section("threshold", [&](Sub& t) {
      t.field("lower", c.threshold.lower);
      t.field("upper", c.threshold.upper);
      t.field("boost", c.threshold.boost);
    });
    s.section("landscape", [&](Sub& t) {
      t.field("perturb_magnitude", c.landscape_controller.perturb_magnitude);
      t.field("assist_gain", c.landscape_controller.assist_gain);
      t.field("sampling_budget", c.landscape_controller.sampling_budget);
    });
  });
  v.section("scenario", [&](Sub& s) {
    s.field("kind", c.scenario.kind);
    s.field("volatility", c.scenario.volatility);
    s.field("ensemble_index", c.scenario.ensemble_index);
    s.section("environment", [&](Sub& e) { environment_fields(e, c.scenario.environment); });
    s.section("nonstationary",
              [&](Sub& e) { nonstationary_fields(e, c.scenario.nonstationary, false); });
  });
  v.section("four_step", [&](Sub& s) {
    s.field("base_amplitude", c.four_step.base_amplitude);
    s.field("durations", c.four_step.durations);
    s.field("degradation", c.four_step.degradation);
    s.field("drift_bias", c.four_step.drift_bias);
    s.field("noise_scale", c.four_step.noise_scale);
    s.field("degraded_fearful_presentations", c.four_step.degraded_fearful_presentations);
    s.field("learned_presentations", c.four_step.learned_presentations);
    s.field("presentation_interval", c.four_step.presentation_interval);
    s.field("readout_window", c.four_step.readout_window);
    s.field("dt", c.four_step.dt);
  });
  v.section("practice", [&](Sub& s) {
    s.field("trials", c.practice.trials);
    s.field("dt", c.practice.dt);
    s.field("start_arousal", c.practice.start_arousal);
    s.field("rest_steps", c.practice.rest_steps);
    s.field("max_trial_steps", c.practice.max_trial_steps);
    s.field("base_amplitude", c.practice.base_amplitude);
    s.field("degradation", c.practice.degradation);
    s.field("noise_scale", c.practice.noise_scale);
    s.field("volatility", c.practice.volatility);
    s.section("nonstationary",
              [&](Sub& e) { nonstationary_fields(e, c.practice.nonstationary, true); });
  });
  v.section("compare", [&](Sub& s) {
    s.field("ensemble", c.compare.ensemble);
    s.field("bootstrap_resamples", c.compare.bootstrap_resamples);
    s.field("workers", c.compare.workers);
    s.field("write_traces", c.compare.write_traces);
  });
}

void require(bool ok, const std::string& key, const std::string& bound) {
  if (!ok) throw ConfigError("'" + key + "' violates bound: " + bound, key);
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_environment(const Environment& e, const std::string& p) {
  require(unit(e.degradation), p + ".degradation", "0 <= degradation <= 1");
  require(unit(e.stimulus_clarity), p + ".stimulus_clarity", "0 <= stimulus_clarity <= 1");
  require(std::isfinite(e.drift_bias), p + ".drift_bias", "finite");
  require(e.noise_scale >= 0.0, p + ".noise_scale", "noise_scale >= 0");
}

void check_nonstationary(const NonstationaryParams& n, const std::string& p) {
  require(n.length >= 1, p + ".length", "length >= 1");
  require(n.switch_rate >= 0.0, p + ".switch_rate", "switch_rate >= 0");
  require(unit(n.degradation_center), p + ".degradation_center", "0 <= degradation_center <= 1");
  require(n.degradation_spread >= 0.0, p + ".degradation_spread", "degradation_spread >= 0");
  require(n.bias_spread >= 0.0, p + ".bias_spread", "bias_spread >= 0");
  require(n.noise_scale >= 0.0, p + ".noise_scale", "noise_scale >= 0");
  require(unit(n.stimulus_clarity), p + ".stimulus_clarity", "0 <= stimulus_clarity <= 1");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.format_version == kConfigFormatVersion, "format_version",
          "format_version == " + std::to_string(kConfigFormatVersion));
  require(c.steps >= 1, "steps", "steps >= 1");
  require(c.dt > 0.0, "dt", "dt > 0");
  require(c.controller == "threshold" || c.controller == "landscape" || c.controller == "passive",
          "controller", "one of threshold|landscape|passive");

  const auto& ls = c.setup.landscape;
  require(ls.n >= 1 && ls.n <= kMaxLoci, "landscape.n", "1 <= n <= 24");
  require(ls.k >= 0, "landscape.k", "k >= 0");
  require(ls.k <= ls.n - 1, "landscape.k", "k <= n-1");

  const auto& ph = c.setup.physiology;
  require(ph.capacity.lo >= 0.0 && ph.capacity.hi <= 1.0 && ph.capacity.lo <= ph.capacity.hi,
          "physiology.capacity", "0 <= lo <= hi <= 1");
  for (double x : ph.indicators) {
    require(x >= ph.capacity.lo && x <= ph.capacity.hi, "physiology.initial_indicators",
            "inside capacity");
  }
  require(unit(ph.mu), "physiology.mu", "0 <= mu <= 1");
  require(ph.sigma > 0.0, "physiology.sigma", "sigma > 0");
  require(ph.amplitude > 0.0 && ph.amplitude <= 1.0, "physiology.amplitude",
          "0 < amplitude <= 1");
  require(std::abs(ph.hysteresis_offset) <= 0.2, "physiology.hysteresis_offset",
          "-0.2 <= hysteresis_offset <= 0.2");
  for (double h : ph.habituation_rates) {
    require(h >= 0.0, "physiology.habituation_rates", "rates >= 0");
  }
  require(ph.reversion_rate >= 0.0, "physiology.reversion_rate", "reversion_rate >= 0");

  const auto& m = c.setup.memory;
  require(unit(m.alpha_fear), "memory.alpha_fear", "0 <= alpha_fear <= 1");
  require(unit(m.alpha_decl), "memory.alpha_decl", "0 <= alpha_decl <= 1");
  require(unit(m.interference), "memory.interference", "0 <= interference <= 1");

  const auto& e = c.setup.engine;
  require(e.hysteresis.critical_width >= 0.0, "hysteresis.critical_width", "critical_width >= 0");
  require(e.hysteresis.delta >= 0.0, "hysteresis.delta", "delta >= 0");
  require(e.hysteresis.limit >= 0.0 && e.hysteresis.limit <= 0.2, "hysteresis.limit",
          "0 <= limit <= 0.2");
  require(e.ratchet.threshold >= 0.0, "ratchet.threshold", "threshold >= 0");
  require(e.ratchet.widen_fraction >= 0.0, "ratchet.widen_fraction", "widen_fraction >= 0");
  require(e.phase.robust_radius >= 0.0, "assessment.robust_radius", "robust_radius >= 0");
  require(e.phase.balance_band >= 0.0, "assessment.balance_band", "balance_band >= 0");
  require(e.regime.relative_tolerance >= 0.0, "assessment.regime_tolerance",
          "regime_tolerance >= 0");
  require(e.regime_window >= 3, "assessment.regime_window", "regime_window >= 3");
  require(e.fc_window >= 1, "assessment.fc_window", "fc_window >= 1");
  require(e.fc_range.lo < e.fc_range.hi, "assessment.fc_range", "lo < hi");
  require(unit(e.optimal_performance), "engine.optimal_performance",
          "0 <= optimal_performance <= 1");
  require(e.degradation_load >= 0.0, "engine.degradation_load", "degradation_load >= 0");
  require(e.learning_gain >= 0.0, "engine.learning_gain", "learning_gain >= 0");
  require(e.skill_gain >= 0.0, "engine.skill_gain", "skill_gain >= 0");
  require(e.steps_per_walk_move >= 1, "engine.steps_per_walk_move", "steps_per_walk_move >= 1");

  require(c.threshold.lower < c.threshold.upper, "controllers.threshold.lower", "lower < upper");
  require(c.threshold.boost >= 0.0, "controllers.threshold.boost", "boost >= 0");
  require(c.landscape_controller.perturb_magnitude > 0.0,
          "controllers.landscape.perturb_magnitude", "perturb_magnitude > 0");
  require(unit(c.landscape_controller.assist_gain), "controllers.landscape.assist_gain",
          "0 <= assist_gain <= 1");
  require(c.landscape_controller.sampling_budget >= 0, "controllers.landscape.sampling_budget",
          "sampling_budget >= 0");

  const auto& sc = c.scenario;
  require(sc.kind == "constant" || sc.kind == "nonstationary" || sc.kind == "four_step" ||
              sc.kind == "practice" || sc.kind == "practice_nonstationary",
          "scenario.kind",
          "one of constant|nonstationary|four_step|practice|practice_nonstationary");
  require(sc.volatility >= 0.0, "scenario.volatility", "volatility >= 0");
  require(sc.ensemble_index >= 0, "scenario.ensemble_index", "ensemble_index >= 0");
  check_environment(sc.environment, "scenario.environment");
  check_nonstationary(sc.nonstationary, "scenario.nonstationary");

  const auto& fs = c.four_step;
  require(fs.base_amplitude > 0.0 && fs.base_amplitude <= 1.0, "four_step.base_amplitude",
          "0 < base_amplitude <= 1");
  require(fs.readout_window >= 1, "four_step.readout_window", "readout_window >= 1");
  for (int d : fs.durations) {
    require(d >= fs.readout_window, "four_step.durations", "each duration >= readout_window");
  }
  for (double d : fs.degradation) require(unit(d), "four_step.degradation", "entries in [0, 1]");
  require(fs.noise_scale >= 0.0, "four_step.noise_scale", "noise_scale >= 0");
  require(fs.degraded_fearful_presentations >= 0, "four_step.degraded_fearful_presentations",
          ">= 0");
  require(fs.learned_presentations >= 0, "four_step.learned_presentations", ">= 0");
  require(fs.presentation_interval >= 1, "four_step.presentation_interval", ">= 1");
  require(fs.dt > 0.0, "four_step.dt", "dt > 0");

  const auto& pr = c.practice;
  require(pr.trials >= 3, "practice.trials", "trials >= 3");
  require(pr.dt > 0.0, "practice.dt", "dt > 0");
  require(unit(pr.start_arousal), "practice.start_arousal", "0 <= start_arousal <= 1");
  require(pr.rest_steps >= 0, "practice.rest_steps", "rest_steps >= 0");
  require(pr.max_trial_steps >= 1, "practice.max_trial_steps", "max_trial_steps >= 1");
  require(pr.base_amplitude > 0.0 && pr.base_amplitude <= 1.0, "practice.base_amplitude",
          "0 < base_amplitude <= 1");
  require(unit(pr.degradation), "practice.degradation", "0 <= degradation <= 1");
  require(pr.noise_scale >= 0.0, "practice.noise_scale", "noise_scale >= 0");
  require(pr.volatility >= 0.0, "practice.volatility", "volatility >= 0");
  check_nonstationary(pr.nonstationary, "practice.nonstationary");

  require(c.compare.ensemble >= 1, "compare.ensemble", "ensemble >= 1");
  require(c.compare.bootstrap_resamples >= 1, "compare.bootstrap_resamples",
          "bootstrap_resamples >= 1");
  require(c.compare.workers >= 0, "compare.workers", "workers >= 0");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what(),
                      "", line, col);
  }
  Reader root(&doc, "");
  visit_config(root, config);
  root.finish();
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'", "");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.key(), e.line(), e.column());
  }
}

std::string serialize_config(const RunConfig& config) {
  ordered_json doc = ordered_json::object();
  Writer w(doc);
  visit_config(w, config);
  return doc.dump(2) + "\n";
}

ControllerConfig controller_by_name(const RunConfig& config, const std::string& name) {
  if (name == "threshold") return config.threshold;
  if (name == "landscape") return config.landscape_controller;
  if (name == "passive") return PassiveConfig{};
  throw ConfigError("unknown controller '" + name + "'", "controller");
}

ScenarioScript selected_scenario(const RunConfig& c) {
  const auto& sc = c.scenario;
  if (sc.kind == "constant") return constant_scenario(sc.environment, c.steps);
  if (sc.kind == "four_step") return four_step(c.four_step).script;
  if (sc.kind == "nonstationary") {
    NonstationaryParams p = sc.nonstationary;
    p.length = c.steps;
    auto scripts = nonstationary_ensemble(sc.ensemble_index + 1, c.seed, sc.volatility, p);
    return scripts.back();
  }
  throw ConfigError("scenario kind '" + sc.kind + "' is not a fixed script", "scenario.kind");
}

std::vector<ScenarioScript> comparison_ensemble(const RunConfig& c, int count) {
  NonstationaryParams p = c.scenario.nonstationary;
  p.length = c.steps;
  return nonstationary_ensemble(count, c.seed, c.scenario.volatility, p);
}

}  // namespace adaptloop
