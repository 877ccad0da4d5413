#include "periodbench/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "periodbench/config.hpp"
#include "periodbench/errors.hpp"
#include "periodbench/parallel.hpp"
#include "periodbench/report.hpp"

namespace periodbench::cli {
namespace {

void apply(const RunOverrides& overrides, LoadedConfig& cfg) {
  if (overrides.seed) cfg.run.seed = *overrides.seed;
  if (overrides.out) cfg.output = *overrides.out;
}

int emit(const std::optional<std::filesystem::path>& path, const std::string& csv, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, csv);
  } else {
    out << csv;
  }
  return kExitOk;
}

void warn_failed_rows(const EvalReport& report, std::ostream& err) {
  for (const auto& r : report.rows) {
    if (!r.failure_reason.empty()) {
      err << "warning: " << r.label << " [" << r.protocol << "]: " << r.failure_reason << '\n';
    } else if (r.runs_failed > 0) {
      err << "warning: " << r.label << " [" << r.protocol << "]: " << r.runs_failed << " of "
          << (r.runs_ok + r.runs_failed) << " runs failed\n";
    }
  }
}

template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    LoadedConfig cfg = load_config(config_path);
    apply(overrides, cfg);
    const EvalReport report = compare(cfg.run);
    warn_failed_rows(report, err);
    std::ostringstream csv;
    write_report_csv(report, csv);
    return emit(cfg.output, csv.str(), out);
  });
}

int cmd_profile(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedConfig cfg = load_config(config_path);
    cfg.run.validate();
    const ProfileMap profiles = collect_profiles(cfg.run);
    out << "label,kind,particle_count,cost_model,secs_per_iter,sample_count,low_resolution,period\n";
    for (const auto& f : cfg.run.filters) {
      out << f.label << ',' << to_string(f.spec.kind) << ',' << f.spec.cost_units() << ',' << cost_name(f.cost)
          << ',';
      std::optional<TimingProfile> profile;
      if (const auto* s = std::get_if<SyntheticCost>(&f.cost)) {
        out << format_double(s->c0 + s->c1 * f.spec.cost_units()) << ",0,false,";
      } else if (std::holds_alternative<MeasuredCost>(f.cost)) {
        profile = profiles.at(f.label);
        out << format_double(profile->median_secs_per_iter) << ',' << profile->sample_count << ','
            << (profile->low_resolution ? "true" : "false") << ',';
        if (profile->low_resolution) {
          err << "warning: " << f.label << ": median iteration time is close to the clock resolution\n";
        }
      } else {
        out << ",0,false,";
      }
      out << format_double(derive_period(f.cost, profile, cfg.run.mapping, f.spec).value()) << '\n';
    }
    return kExitOk;
  });
}

int cmd_sweep(const std::filesystem::path& config_path, const std::vector<int>& particle_counts,
              const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    LoadedConfig cfg = load_config(config_path);
    apply(overrides, cfg);
    if (particle_counts.empty()) throw ConfigError("--particles", "expected at least one particle count");
    for (int n : particle_counts) {
      if (n < 1) throw ConfigError("--particles", "particle counts must be >= 1");
    }
    const auto pf = std::find_if(cfg.run.filters.begin(), cfg.run.filters.end(),
                                 [](const FilterEntry& f) { return f.spec.kind == FilterKind::PF; });
    if (pf == cfg.run.filters.end()) throw ConfigError("filters", "sweep needs a filter with kind \"pf\"");

    const FilterEntry base = *pf;
    cfg.run.filters.clear();
    std::vector<int> counts = particle_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    for (int n : counts) {
      FilterEntry e = base;
      e.label = base.label + "_n" + std::to_string(n);
      e.spec.particle_count = n;
      cfg.run.filters.push_back(std::move(e));
    }
    EvalReport report = compare(cfg.run);
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const EvalRow& a, const EvalRow& b) { return a.particle_count < b.particle_count; });
    warn_failed_rows(report, err);
    std::ostringstream csv;
    write_sweep_csv(report, csv);
    return emit(cfg.output, csv.str(), out);
  });
}

int main(int argc, char** argv) {
  CLI::App app{"Period-aware Monte Carlo benchmark for recursive filters"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for Monte Carlo evaluation (default: all)")
      ->check(CLI::PositiveNumber);

  std::string config;
  RunOverrides overrides;
  std::uint64_t seed = 0;
  std::string out_path;
  std::vector<int> particles;

  auto* run = app.add_subcommand("run", "Evaluate the configured filters under the configured protocols");
  run->add_option("--config", config, "Configuration file (JSON)")->required();
  auto* run_seed = run->add_option("--seed", seed, "Override the configured seed");
  auto* run_out = run->add_option("--out", out_path, "Override the configured output path");

  auto* profile = app.add_subcommand("profile", "Report per-filter iteration cost and derived period");
  profile->add_option("--config", config, "Configuration file (JSON)")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep the particle filter's particle count under both protocols");
  sweep->add_option("--config", config, "Configuration file (JSON)")->required();
  sweep->add_option("--particles", particles, "Comma-separated particle counts")->required()->delimiter(',');
  auto* sweep_seed = sweep->add_option("--seed", seed, "Override the configured seed");
  auto* sweep_out = sweep->add_option("--out", out_path, "Override the configured output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (threads > 0) set_threads(threads);

  if (*run_seed || *sweep_seed) overrides.seed = seed;
  if (*run_out || *sweep_out) overrides.out = out_path;

  if (*run) return cmd_run(config, overrides, std::cout, std::cerr);
  if (*profile) return cmd_profile(config, std::cout, std::cerr);
  return cmd_sweep(config, particles, overrides, std::cout, std::cerr);
}

}  // namespace periodbench::cli
