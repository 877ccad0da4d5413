#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace periodbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Runs the configured protocol(s) and writes the report CSV to the
/// configured or overridden path, or to `out` when neither is set.
int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);

/// Prints per-filter cost and derived period as CSV.
int cmd_profile(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// Expands the first PF entry over `particle_counts` and writes the long-format sweep CSV.
int cmd_sweep(const std::filesystem::path& config_path, const std::vector<int>& particle_counts,
              const RunOverrides& overrides, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace periodbench::cli
