#include "adaptloop/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adaptloop/error.hpp"

namespace adaptloop {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ShapeError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class Fn>
std::string per_row_csv(const Trace& trace, const char* header, Fn&& fn) {
  std::string out = header;
  out += '\n';
  for (const auto& row : trace.rows) {
    out += fn(row);
    out += '\n';
  }
  return out;
}

ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json arm_json(const ArmSummary& arm) {
  ordered_json j;
  j["controller"] = arm.controller;
  j["mean_time_in_optimal"] = arm.mean_time_in_optimal;
  j["mean_hysteresis_drift"] = arm.mean_hysteresis_drift;
  j["mean_first_equilibrium_time"] = finite_or_null(arm.mean_first_equilibrium_time);
  j["runs_without_equilibrium"] = arm.runs_without_equilibrium;
  j["phase_occupancy"] = arm.phase_occupancy;
  return j;
}

}  // namespace

std::string trace_csv(const Trace& trace) {
  return per_row_csv(trace, kTraceCsvHeader, [](const TraceRow& r) {
    std::string s = format_number(r.t);
    for (double x : r.indicators) s += "," + format_number(x);
    s += "," + format_number(r.arousal);
    s += "," + format_number(r.performance);
    s += "," + std::to_string(r.gauge);
    s += "," + format_number(r.f_c);
    s += "," + format_number(r.s_c);
    s += ",";
    s += to_string(r.phase);
    s += ",";
    s += to_string(r.regime);
    s += ",";
    s += to_string(r.action);
    s += "," + format_number(r.hysteresis_offset);
    s += "," + r.genotype.to_string();
    s += "," + format_number(r.landscape_fitness);
    return s;
  });
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw ShapeError("trace header does not match the expected columns");
  }
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 15) {
      throw ShapeError("trace line " + std::to_string(lineno) + ": expected 15 columns, got " +
                       std::to_string(cells.size()));
    }
    TraceRow r;
    r.step = static_cast<long>(rows.size());
    r.t = parse_double(cells[0], lineno);
    for (int i = 0; i < kIndicatorCount; ++i) r.indicators[i] = parse_double(cells[1 + i], lineno);
    r.arousal = parse_double(cells[4], lineno);
    r.performance = parse_double(cells[5], lineno);
    r.gauge = static_cast<int>(parse_double(cells[6], lineno));
    r.f_c = parse_double(cells[7], lineno);
    r.s_c = parse_double(cells[8], lineno);
    try {
      r.phase = parse_phase(cells[9]);
      r.regime = parse_regime(cells[10]);
      r.action = parse_action(cells[11]);
      r.genotype = Genotype::parse(cells[13]);
    } catch (const Error& e) {
      throw ShapeError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    r.hysteresis_offset = parse_double(cells[12], lineno);
    r.landscape_fitness = parse_double(cells[14], lineno);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  try {
    return parse_trace_csv(read_text(path));
  } catch (const ShapeError& e) {
    throw ShapeError(path.string() + ": " + e.what());
  }
}

std::string gauge_plot_csv(const Trace& trace) {
  return per_row_csv(trace, "t,performance,gauge", [](const TraceRow& r) {
    return format_number(r.t) + "," + format_number(r.performance) + "," +
           std::to_string(r.gauge);
  });
}

std::string fs_plot_csv(const Trace& trace) {
  return per_row_csv(trace, "t,f_c,s_c,regime", [](const TraceRow& r) {
    return format_number(r.t) + "," + format_number(r.f_c) + "," + format_number(r.s_c) + "," +
           std::string(to_string(r.regime));
  });
}

std::string phase_portrait_csv(const Trace& trace) {
  return per_row_csv(trace, "f_c,s_c,phase", [](const TraceRow& r) {
    return format_number(r.f_c) + "," + format_number(r.s_c) + "," +
           std::string(to_string(r.phase));
  });
}

ordered_json header_json(const TraceHeader& h) {
  ordered_json j;
  j["format_version"] = h.format_version;
  j["seed"] = h.seed;
  j["controller"] = h.controller;
  j["scenario"] = h.scenario;
  j["steps"] = h.steps;
  j["dt"] = h.dt;
  return j;
}

ordered_json metrics_json(const RunMetrics& m) {
  ordered_json j;
  j["time_in_optimal"] = m.time_in_optimal;
  j["hysteresis_drift"] = m.hysteresis_drift;
  j["first_equilibrium_time"] = finite_or_null(m.first_equilibrium_time);
  j["robustness"] = robustness_indicator(m.first_equilibrium_time);
  j["phase_occupancy"] = m.phase_occupancy;
  return j;
}

ordered_json report_json(const ComparisonReport& r) {
  ordered_json j;
  j["format_version"] = 1;
  j["master_seed"] = r.master_seed;
  j["ensemble_size"] = r.ensemble_size;
  j["bootstrap_resamples"] = r.bootstrap_resamples;
  j["first"] = arm_json(r.first);
  j["second"] = arm_json(r.second);
  j["difference"] = {{"measure", "second.time_in_optimal - first.time_in_optimal"},
                     {"mean", r.mean_difference},
                     {"ci95_low", r.ci_low},
                     {"ci95_high", r.ci_high}};
  j["per_scenario"] = ordered_json::array();
  for (std::size_t i = 0; i < r.differences.size(); ++i) {
    j["per_scenario"].push_back({{"index", i}, {"seed", r.run_seeds[i]},
                                 {"difference", r.differences[i]}});
  }
  return j;
}

std::string summary_json(const Trace& trace, const RunMetrics& metrics,
                         const ordered_json& extra) {
  ordered_json j;
  j["header"] = header_json(trace.header);
  j["seed"] = trace.header.seed;
  j["rows"] = trace.rows.size();
  j["flat_fc_steps"] = trace.flat_fc_steps;
  j["metrics"] = metrics_json(metrics);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  if (!trace.header.config_json.empty()) {
    j["config"] = ordered_json::parse(trace.header.config_json);
  }
  return j.dump(2) + "\n";
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<fs::path> write_outputs(const Trace& trace, const fs::path& dir,
                                    double optimal_performance, const ordered_json& extra) {
  const RunMetrics metrics = run_metrics(trace, optimal_performance);
  std::vector<std::pair<fs::path, std::string>> files{
      {dir / "trace.csv", trace_csv(trace)},
      {dir / "summary.json", summary_json(trace, metrics, extra)},
      {dir / "plotdata" / "gauge_vs_time.csv", gauge_plot_csv(trace)},
      {dir / "plotdata" / "fs_vs_time.csv", fs_plot_csv(trace)},
      {dir / "plotdata" / "phase_portrait.csv", phase_portrait_csv(trace)},
  };
  std::vector<fs::path> paths;
  for (const auto& [path, content] : files) {
    write_text(path, content);
    paths.push_back(path);
  }
  return paths;
}

std::vector<fs::path> write_outputs(const ComparisonResult& result, const fs::path& dir,
                                    double optimal_performance) {
  std::vector<fs::path> paths;
  const fs::path report = dir / "report.json";
  write_text(report, report_json(result.report).dump(2) + "\n");
  paths.push_back(report);
  auto write_arm = [&](const std::vector<Trace>& traces, const std::string& arm) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const fs::path run = dir / "runs" / (arm + "_" + std::to_string(i));
      for (auto& p : write_outputs(traces[i], run, optimal_performance)) paths.push_back(p);
    }
  };
  write_arm(result.first_traces, "first");
  write_arm(result.second_traces, "second");
  return paths;
}

}  // namespace adaptloop
