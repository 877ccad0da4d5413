#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "periodbench/bench.hpp"

namespace periodbench {

inline constexpr std::string_view kReportHeader =
    "label,protocol,period,noise_summary,steps,rmse_median,rmse_iqr,runs_ok,runs_failed,seed";
inline constexpr std::string_view kSweepHeader =
    "particle_count,label,protocol,period,noise_summary,steps,rmse_median,rmse_iqr,runs_ok,runs_failed,seed";

/// %.17g: round-trips any double exactly.
std::string format_double(double v);

void write_report_csv(const EvalReport& report, std::ostream& out);
/// Long format for RMSE-vs-N plots: the report columns prefixed by particle_count.
void write_sweep_csv(const EvalReport& report, std::ostream& out);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace periodbench
