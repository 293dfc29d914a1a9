#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dtids/text.hpp"

namespace dtids::cli {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

struct OptionSpec {
  std::string key;       // config key; the flag is --key with '_' written as '-'
  std::string fallback;  // empty = unset
  std::string help;
};

/// Options understood by a command, in manifest order.
const std::vector<OptionSpec>& command_options(std::string_view command);
std::vector<std::string> command_names();

std::string flag_name(std::string_view key);

/// Resolved parameters of one command run: defaults, then the config file,
/// then command-line flags (flag wins).
class Settings {
 public:
  Settings() = default;

  static Settings resolve(std::string_view command, const std::string& config_path,
                          const std::map<std::string, std::string>& flags);
  /// Reads a run manifest back; every option is taken as given.
  static Settings from_manifest(const std::filesystem::path& path);

  const std::string& command() const noexcept { return command_; }
  const std::string& config_path() const noexcept { return config_path_; }

  bool has(std::string_view key) const;
  /// True when the value came from the config file, a flag or a manifest.
  bool is_explicit(std::string_view key) const { return explicit_.count(std::string(key)) > 0; }
  std::string get(std::string_view key) const;
  /// Throws ConfigError naming the flag when the value is empty.
  std::string require(std::string_view key) const;
  long long integer(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  double number(std::string_view key) const;
  std::vector<std::string> list(std::string_view key) const;
  void set(std::string_view key, std::string value);

  /// command, toolkit_version, config, every option, then the output files.
  KeyValueFile manifest(const std::vector<std::string>& outputs) const;
  void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& outputs) const;

 private:
  std::string command_;
  std::string config_path_;
  KeyValueFile values_;
  std::set<std::string> explicit_;
};

}  // namespace dtids::cli
