#include "dtids/text.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dtids/error.hpp"

namespace dtids {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& source) {
  KeyValueFile kv;
  kv.source_ = source;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    kv.entries_.push_back({std::string(key), std::string(trim(line.substr(eq + 1)))});
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string KeyValueFile::to_text() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

void KeyValueFile::save(const std::filesystem::path& path) const { write_file(path, to_text()); }

bool KeyValueFile::has(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

std::string KeyValueFile::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
  return *v;
}

std::string KeyValueFile::get_or(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

double KeyValueFile::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  auto d = parse_double(*v);
  if (!d) throw ConfigError(source_ + ": key '" + std::string(key) + "' is not a number: " + *v);
  return *d;
}

std::int64_t KeyValueFile::get_int(std::string_view key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  auto i = parse_int(*v);
  if (!i) throw ConfigError(source_ + ": key '" + std::string(key) + "' is not an integer: " + *v);
  return *i;
}

void KeyValueFile::set(std::string_view key, std::string value) {
  bool placed = false;
  std::vector<KeyValue> kept;
  kept.reserve(entries_.size() + 1);
  for (auto& e : entries_) {
    if (e.key != key) {
      kept.push_back(std::move(e));
    } else if (!placed) {
      kept.push_back({e.key, value});
      placed = true;
    }
  }
  if (!placed) kept.push_back({std::string(key), std::move(value)});
  entries_ = std::move(kept);
}

void KeyValueFile::add(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value)});
}

}  // namespace dtids
