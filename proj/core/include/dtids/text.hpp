#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtids {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

struct KeyValue {
  std::string key;
  std::string value;
};

/// Flat `key = value` text: one pair per line, `#` starts a comment, keys may
/// repeat and insertion order is preserved.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text, const std::string& source = "<text>");
  /// Throws ConfigError naming the path when it cannot be read.
  static KeyValueFile load(const std::filesystem::path& path);

  std::string to_text() const;
  void save(const std::filesystem::path& path) const;

  const std::vector<KeyValue>& entries() const noexcept { return entries_; }
  bool has(std::string_view key) const;
  /// Last value stored under key.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  std::string require(std::string_view key) const;

  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;

  /// Replaces every value under key with one entry (kept at the first
  /// position) or appends when absent.
  void set(std::string_view key, std::string value);
  void add(std::string key, std::string value);

 private:
  std::vector<KeyValue> entries_;
  std::string source_ = "<text>";
};

}  // namespace dtids
