#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "periodbench/bench.hpp"

namespace periodbench {

/// Invalid configuration document. `key_path()` is the dotted path of the
/// offending key, e.g. "model.q" or "filters[1].cost.c1".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : std::runtime_error(key_path + ": " + message), key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

struct LoadedConfig {
  RunConfig run;
  std::optional<std::filesystem::path> output;
};

LoadedConfig parse_config(const nlohmann::json& doc);
LoadedConfig parse_config_text(const std::string& text);
LoadedConfig load_config(const std::filesystem::path& path);

}  // namespace periodbench
