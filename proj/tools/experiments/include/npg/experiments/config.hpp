#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace npg::experiments {

/// A config problem the user must fix. The message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConfigKey {
  std::string name;
  std::string description;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_schema();

/**
 * Flat dotted key/value configuration.
 *
 * File syntax: one `key = value` per line, `#` starts a comment, blank lines
 * are ignored. Unknown keys are rejected. Environment variables named
 * NPG_<KEY> (upper case, dots as underscores) override file values.
 */
class Config {
 public:
  /// Bundled defaults for a recipe; throws ConfigError for an unknown recipe.
  static Config defaults_for(const std::string& recipe);

  /// Parses `text` (file contents) on top of this config. `origin` labels errors.
  void merge_text(const std::string& text, const std::string& origin);
  /// merge_text on a file; the file must define every key in required_file_keys().
  void merge_file(const std::string& path);
  /// Copies every value set in `other` over this config.
  void overlay(const Config& other);
  /// Applies NPG_* overrides found in `environment` (entries "NAME=value").
  void merge_environment(const std::vector<std::string>& environment);
  void merge_process_environment();

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] bool has(const std::string& key) const;

  [[nodiscard]] std::string get_string(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] std::uint64_t get_uint64(const std::string& key) const;
  [[nodiscard]] bool get_bool(const std::string& key) const;
  /// True when the value is the literal "auto".
  [[nodiscard]] bool is_auto(const std::string& key) const;

  /// Every key = value line, sorted by key, suitable for merge_text.
  [[nodiscard]] std::string dump() const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  /// Environment variable name for a key: "sgd.steps" -> "NPG_SGD_STEPS".
  static std::string env_name(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

/// Keys a config file must define itself.
const std::vector<std::string>& required_file_keys();

}  // namespace npg::experiments
