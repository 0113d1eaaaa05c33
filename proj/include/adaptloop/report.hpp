#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adaptloop/mitigation.hpp"
#include "adaptloop/scenarios.hpp"
#include "json.hpp"

namespace adaptloop {

inline constexpr const char* kTraceCsvHeader =
    "t,ind1,ind2,ind3,arousal,performance,gauge,f_c,s_c,phase,regime,action,"
    "hysteresis_offset,genotype,landscape_fitness";

// At most 9 significant digits, shortest form that round-trips at that
// precision, independent of the global locale.
std::string format_number(double value);

std::string trace_csv(const Trace& trace);
std::vector<TraceRow> parse_trace_csv(const std::string& text);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

std::string gauge_plot_csv(const Trace& trace);
std::string fs_plot_csv(const Trace& trace);
std::string phase_portrait_csv(const Trace& trace);

nlohmann::ordered_json header_json(const TraceHeader& header);
nlohmann::ordered_json metrics_json(const RunMetrics& metrics);
nlohmann::ordered_json report_json(const ComparisonReport& report);

// summary.json: header, metrics, config echo and any caller-supplied extras.
std::string summary_json(const Trace& trace, const RunMetrics& metrics,
                         const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

// Writes trace.csv, summary.json and plotdata/*.csv; returns the written paths.
std::vector<std::filesystem::path> write_outputs(
    const Trace& trace, const std::filesystem::path& dir, double optimal_performance,
    const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

// Writes report.json (and per-run traces when present); returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ComparisonResult& result,
                                                 const std::filesystem::path& dir,
                                                 double optimal_performance);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace adaptloop
