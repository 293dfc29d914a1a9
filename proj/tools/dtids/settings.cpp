#include "settings.hpp"

#include <algorithm>

#include "dtids/error.hpp"

namespace dtids::cli {

namespace {

const std::map<std::string, std::vector<OptionSpec>, std::less<>>& option_table() {
  static const std::map<std::string, std::vector<OptionSpec>, std::less<>> table{
      {"synth",
       {{"scenario", "", "scenario file (key-value text)"},
        {"benchmark", "", "named bundle: separable-small, transfer-pair or imbalanced"},
        {"seed", "", "generator seed (overrides the scenario file)"},
        {"out", "", "output directory"}}},
      {"prepare",
       {{"raw", "", "raw CSV file or directory of per-sensor CSVs"},
        {"schemas", "", "schema file or directory of <name>.schema files (default: next to the data)"},
        {"seed", "1", "split seed"},
        {"esd_alpha", "0.05", "significance level of the outlier test"},
        {"esd_max_outliers", "10", "upper bound on outliers per column"},
        {"prune_threshold", "0.95", "drop the later column of pairs with |r| above this"},
        {"out", "", "output directory"}}},
      {"train",
       {{"data", "", "prepared directory"},
        {"model", "presnet", "presnet, mlp or fcn"},
        {"task", "binary", "binary or multiclass"},
        {"window", "10", "length each feature is repeated to"},
        {"epochs", "200", "epoch limit"},
        {"batch", "64", "mini-batch size"},
        {"optimizer", "adam", "adam or adadelta"},
        {"lr", "", "learning rate (default: the optimizer's)"},
        {"patience", "20", "early-stopping patience in epochs, or none"},
        {"seed", "1", "initialisation and shuffling seed"},
        {"out", "", "output directory"}}},
      {"evaluate",
       {{"checkpoint", "", "checkpoint file"},
        {"data", "", "prepared directory"},
        {"split", "test", "train, val or test"},
        {"out", "", "output directory"}}},
      {"transfer",
       {{"source", "", "source CSV (raw, with a schema)"},
        {"source_schema", "", "schema of the source CSV (default: same name, .schema)"},
        {"target", "", "target CSV"},
        {"target_schema", "", "schema of the target CSV (default: same name, .schema)"},
        {"channels", "", "comma-separated channel columns (default: one per sensor)"},
        {"window", "10", "window length"},
        {"source_stride", "20", "window stride on the source series"},
        {"stride", "1", "window stride on the target series"},
        {"source_epochs", "5", "pre-training epochs"},
        {"epochs", "15", "epochs for both target arms"},
        {"batch", "64", "mini-batch size"},
        {"optimizer", "adam", "adam or adadelta"},
        {"freeze", "all", "all, head or frozen"},
        {"seeds", "1,2,3,4,5", "comma-separated seeds"},
        {"seed", "", "single seed (overrides seeds)"},
        {"out", "", "output directory"}}},
      {"report",
       {{"runs", "", "comma-separated run directories"},
        {"out", "", "output directory"}}},
  };
  return table;
}

const OptionSpec* find_option(std::string_view command, std::string_view key) {
  const auto& opts = command_options(command);
  auto it = std::find_if(opts.begin(), opts.end(), [&](const OptionSpec& o) { return o.key == key; });
  return it == opts.end() ? nullptr : &*it;
}

}  // namespace

const std::vector<OptionSpec>& command_options(std::string_view command) {
  const auto& table = option_table();
  auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + std::string(command) + "'");
  return it->second;
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [name, opts] : option_table()) names.push_back(name);
  return names;
}

std::string flag_name(std::string_view key) {
  std::string f(key);
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

Settings Settings::resolve(std::string_view command, const std::string& config_path,
                           const std::map<std::string, std::string>& flags) {
  Settings s;
  s.command_ = command;
  s.config_path_ = config_path;
  for (const auto& o : command_options(command)) s.values_.add(o.key, o.fallback);
  if (!config_path.empty()) {
    const auto kv = KeyValueFile::load(config_path);
    for (const auto& e : kv.entries()) {
      if (!find_option(command, e.key)) {
        throw ConfigError(config_path + ": key '" + e.key + "' is not an option of " + std::string(command));
      }
      s.set(e.key, e.value);
    }
  }
  for (const auto& [key, value] : flags) {
    if (!find_option(command, key)) throw ConfigError("unknown option " + flag_name(key));
    s.set(key, value);
  }
  return s;
}

Settings Settings::from_manifest(const std::filesystem::path& path) {
  const auto kv = KeyValueFile::load(path);
  Settings s;
  s.command_ = kv.require("command");
  s.config_path_ = kv.get_or("config", "");
  const auto version = kv.get_or("toolkit_version", "");
  if (version != kToolkitVersion) {
    throw ConfigError(path.string() + ": written by toolkit version '" + version + "', this is " +
                      std::string(kToolkitVersion));
  }
  for (const auto& o : command_options(s.command_)) {
    s.values_.add(o.key, o.fallback);
    if (auto v = kv.get(o.key)) s.set(o.key, *v);
  }
  return s;
}

bool Settings::has(std::string_view key) const { return !get(key).empty(); }

std::string Settings::get(std::string_view key) const {
  if (!find_option(command_, key)) throw ConfigError("internal: '" + std::string(key) + "' is not an option");
  return values_.get_or(key, "");
}

std::string Settings::require(std::string_view key) const {
  auto v = get(key);
  if (v.empty()) throw ConfigError(command_ + ": " + flag_name(key) + " is required");
  return v;
}

long long Settings::integer(std::string_view key) const {
  const auto v = parse_int(require(key));
  if (!v) throw ConfigError(flag_name(key) + ": expected an integer, got '" + get(key) + "'");
  return *v;
}

std::size_t Settings::count(std::string_view key) const {
  const long long v = integer(key);
  if (v < 0) throw ConfigError(flag_name(key) + ": must not be negative");
  return static_cast<std::size_t>(v);
}

double Settings::number(std::string_view key) const {
  const auto v = parse_double(require(key));
  if (!v) throw ConfigError(flag_name(key) + ": expected a number, got '" + get(key) + "'");
  return *v;
}

std::vector<std::string> Settings::list(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& part : split(get(key), ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void Settings::set(std::string_view key, std::string value) {
  values_.set(key, std::move(value));
  explicit_.insert(std::string(key));
}

KeyValueFile Settings::manifest(const std::vector<std::string>& outputs) const {
  KeyValueFile kv;
  kv.add("command", command_);
  kv.add("toolkit_version", std::string(kToolkitVersion));
  kv.add("config", config_path_);
  for (const auto& e : values_.entries()) kv.add(e.key, e.value);
  kv.add("outputs", join(outputs, ","));
  return kv;
}

void Settings::write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& outputs) const {
  manifest(outputs).save(dir / "manifest.txt");
}

}  // namespace dtids::cli
