#include "periodbench/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace periodbench {
namespace {

void write_row_tail(const EvalRow& r, std::ostream& out) {
  out << r.label << ',' << r.protocol << ',' << format_double(r.period) << ',' << format_double(r.noise_summary)
      << ',' << r.steps << ',' << format_double(r.rmse_median) << ',' << format_double(r.rmse_iqr) << ','
      << r.runs_ok << ',' << r.runs_failed << ',' << r.seed << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const auto& r : report.rows) write_row_tail(r, out);
}

void write_sweep_csv(const EvalReport& report, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.particle_count << ',';
    write_row_tail(r, out);
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace periodbench
