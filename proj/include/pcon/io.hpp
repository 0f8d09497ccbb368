#pragma once

#include "pcon/isochronous.hpp"
#include "pcon/poincare.hpp"
#include "pcon/sweep.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pcon {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits; round-trips every double.
[[nodiscard]] std::string format_double(double v);

// ---- JSON ------------------------------------------------------------------

[[nodiscard]] Json to_json(const ModelParams& params);
[[nodiscard]] ModelParams params_from_json(const Json& j);

[[nodiscard]] Json to_json(const NetworkState& state);
/// Expects {"phases": [...], "ftds": [[...], ...]}; lists are sorted on read.
[[nodiscard]] NetworkState state_from_json(const Json& j);

[[nodiscard]] Json to_json(const TraceEvent& event);  // 1-based indices, like the text trace
[[nodiscard]] Json to_json(const PeriodicityResult& result);
[[nodiscard]] Json to_json(const PulseSignature& signature);
[[nodiscard]] Json to_json(const RegionSpec& spec);
[[nodiscard]] Json to_json(const VolumeReport& report);
[[nodiscard]] Json to_json(const OracleReport& report);
[[nodiscard]] Json to_json(const StabilityReport& report);
[[nodiscard]] Json to_json(const ScanRecord& record);
[[nodiscard]] Json to_json(const ParamRecord& record);

// ---- traces ----------------------------------------------------------------

/// One format_event line per event.
void write_trace_text(std::ostream& out, const std::vector<TraceEvent>& events);
/// One JSON object per line.
void write_trace_jsonl(std::ostream& out, const std::vector<TraceEvent>& events);

// ---- dataset headers and CSV -----------------------------------------------

struct RunHeader
{
    std::string command;
    Json config;
    std::uint64_t seed = 0;
    std::string wall_clock;  // ISO 8601 UTC, filled by make_header
};

[[nodiscard]] RunHeader make_header(std::string command, Json config, std::uint64_t seed);

/// "# key: value" lines: tool version, command, seed, wall clock, config.
void write_header(std::ostream& out, const RunHeader& header, const std::string& prefix = "# ");
[[nodiscard]] Json to_json(const RunHeader& header);

void write_scan_csv(std::ostream& out, const PhaseScan& scan);
void write_param_csv(std::ostream& out, const std::vector<ParamRecord>& records);
/// Columns given by `names`, one row per point.
void write_points_csv(std::ostream& out, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& rows);

// ---- gnuplot ---------------------------------------------------------------

/// (theta1, theta2) colored by T_P.
[[nodiscard]] std::string gnuplot_scan_script(const std::string& csv_path, const std::string& png_path);
/// Existence map or volume map over (eps, tau) for one region column.
[[nodiscard]] std::string gnuplot_param_script(const std::string& csv_path, const std::string& png_path,
                                               RegionKind kind, bool volume);
/// Analytic A overlaid with numeric IR4 projections.
[[nodiscard]] std::string gnuplot_projection_script(const std::string& analytic_csv, const std::string& numeric_csv,
                                                    const std::string& png_path);

}  // namespace pcon
