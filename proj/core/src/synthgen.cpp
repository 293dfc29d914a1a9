#include "dtids/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dtids/csv.hpp"
#include "dtids/domain.hpp"
#include "dtids/error.hpp"
#include "dtids/rng.hpp"

namespace dtids {

namespace {

constexpr double kEpochStart = 1556668800.0;  // 2019-05-01 00:00:00 UTC

FeatureGenerator numeric(std::string name, double base, double amplitude, double period, double phase,
                         double noise) {
  FeatureGenerator f;
  f.name = std::move(name);
  f.base = base;
  f.amplitude = amplitude;
  f.period = period;
  f.phase = phase;
  f.noise_sd = noise;
  return f;
}

FeatureGenerator markov(std::string name, std::vector<std::string> states, std::vector<std::vector<double>> t) {
  FeatureGenerator f;
  f.name = std::move(name);
  f.kind = FeatureKind::categorical;
  f.states = std::move(states);
  f.transition = std::move(t);
  return f;
}

FeatureGenerator derived(std::string name, std::vector<std::string> states, std::string from, double threshold) {
  FeatureGenerator f;
  f.name = std::move(name);
  f.kind = FeatureKind::categorical;
  f.states = std::move(states);
  f.derived_from = std::move(from);
  f.threshold = threshold;
  return f;
}

// Days since 1970-01-01 to civil date.
std::string civil_date(long long days) {
  days += 719468;
  const long long era = (days >= 0 ? days : days - 146096) / 146097;
  const long long doe = days - era * 146097;
  const long long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long long mp = (5 * doy + 2) / 153;
  const long long d = doy - (153 * mp + 2) / 5 + 1;
  const long long m = mp < 10 ? mp + 3 : mp - 9;
  const long long y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04lld-%02lld-%02lld", y, m, d);
  return buf;
}

std::string clock_time(long long seconds) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", seconds / 3600, seconds / 60 % 60, seconds % 60);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  return s == "-0.0000" ? "0.0000" : s;
}

double perturb(int kind, double x, const FeatureGenerator& f, std::size_t feature, double severity,
               std::size_t step, std::size_t len, Rng& rng) {
  const double b = f.base, w = f.span(), s = severity;
  const double z = rng.normal();
  switch (kind) {
    case 0: return b + w * (1.0 + 2.0 * s) + 0.05 * w * z;                       // dos: saturated
    case 1: return b + w * (1.0 + 2.0 * s) * (1.0 + 0.25 * std::abs(z));         // ddos: noisy bursts
    case 2: return b - w * (1.0 + 2.0 * s);                                      // injection: constant
    case 3: return x + 2.0 * s * w;                                              // mitm: offset
    case 4: return x + s * w * (1.0 + static_cast<double>(step) / std::max<double>(1.0, len - 1.0));  // backdoor: drift
    case 5: return x + s * w * (1.0 + std::abs(z));                              // password: jitter
    case 6: return x + s * w * (step % 2 ? 2.0 : 1.0);                           // scanning
    case 7: return x + s * w * (step % 3 == 0 ? 3.0 : 1.0);                      // xss: spikes
    case 8: return b + w * (1.0 + 2.0 * s) * (feature % 2 ? -1.0 : 1.0);         // ransomware: scrambled
    default: return x;
  }
}

std::size_t step_state(const FeatureGenerator& f, std::size_t state, Rng& rng) {
  const auto& row = f.transition[state];
  double u = rng.uniform(), acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  return row.size() - 1;
}

}  // namespace

void SensorProfile::validate() const {
  if (name.empty()) throw ConfigError("sensor profile without a name");
  if (!(sample_period > 0.0)) throw ConfigError(name + ": sample period must be positive");
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (f.kind == FeatureKind::numeric) {
      if (f.noise_sd < 0.0) throw ConfigError(name + "." + f.name + ": noise sd must be >= 0");
      if (!(f.period > 0.0)) throw ConfigError(name + "." + f.name + ": period must be positive");
      continue;
    }
    if (f.states.size() < 2) throw ConfigError(name + "." + f.name + ": needs at least two states");
    if (!f.derived_from.empty()) {
      const bool ok = std::any_of(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(i),
                                  [&](const FeatureGenerator& g) {
                                    return g.name == f.derived_from && g.kind == FeatureKind::numeric;
                                  });
      if (!ok) throw ConfigError(name + "." + f.name + ": derived_from must name an earlier numeric feature");
      if (f.states.size() != 2) throw ConfigError(name + "." + f.name + ": threshold features have two states");
      continue;
    }
    if (f.transition.size() != f.states.size()) throw ConfigError(name + "." + f.name + ": transition matrix size");
    for (const auto& row : f.transition) {
      if (row.size() != f.states.size()) throw ConfigError(name + "." + f.name + ": transition matrix size");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw ConfigError(name + "." + f.name + ": negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(name + "." + f.name + ": transition rows must sum to 1");
    }
  }
}

SensorSchema SensorProfile::schema() const {
  SensorSchema s;
  s.sensor = name;
  for (const auto& f : features) s.features.push_back({f.name, f.kind, f.kind == FeatureKind::categorical ? f.states : std::vector<std::string>{}});
  s.label_column = "label";
  s.normal_value = std::to_string(kNormalLabel);
  s.attack_type_column = "type";
  return s;
}

std::vector<SensorProfile> default_profiles() {
  std::vector<SensorProfile> p;
  p.push_back({"fridge",
               {numeric("fridge_temperature", 4.0, 2.0, 96.0, 0.0, 0.3),
                derived("temp_condition", {"low", "high"}, "fridge_temperature", 5.0)}});
  p.push_back({"gps_tracker",
               {numeric("latitude", 40.0, 0.05, 200.0, 0.0, 0.005),
                numeric("longitude", -75.0, 0.05, 250.0, 0.25, 0.005)}});
  p.push_back({"motion_light",
               {markov("motion_status", {"0", "1"}, {{0.9, 0.1}, {0.3, 0.7}}),
                markov("light_status", {"off", "on"}, {{0.85, 0.15}, {0.2, 0.8}})}});
  p.push_back({"garage_door",
               {markov("door_state", {"closed", "open"}, {{0.95, 0.05}, {0.2, 0.8}}),
                markov("sphone_signal", {"false", "true"}, {{0.9, 0.1}, {0.5, 0.5}})}});
  p.push_back({"modbus",
               {numeric("fc1_read_input_register", 30000.0, 2000.0, 50.0, 0.0, 300.0),
                numeric("fc2_read_discrete_value", 32000.0, 1500.0, 70.0, 0.1, 300.0),
                numeric("fc3_read_holding_register", 31000.0, 2500.0, 90.0, 0.2, 300.0),
                numeric("fc4_read_coil", 33000.0, 1000.0, 40.0, 0.3, 300.0)}});
  p.push_back({"thermostat",
               {numeric("current_temperature", 22.0, 3.0, 144.0, 0.1, 0.4),
                derived("thermostat_status", {"0", "1"}, "current_temperature", 22.0)}});
  p.push_back({"weather",
               {numeric("temperature", 25.0, 6.0, 144.0, 0.0, 0.8),
                numeric("pressure", 1010.0, 8.0, 300.0, 0.0, 1.5),
                numeric("humidity", 55.0, 15.0, 144.0, 0.5, 3.0)}});
  return p;
}

std::string profiles_text(const std::vector<SensorProfile>& profiles) {
  KeyValueFile kv;
  for (const auto& p : profiles) {
    kv.add("sensor", p.name + " period=" + format_double(p.sample_period));
    for (const auto& f : p.features) {
      std::string v = p.name + "." + f.name;
      if (f.kind == FeatureKind::numeric) {
        v += " numeric base=" + format_double(f.base) + " amplitude=" + format_double(f.amplitude) +
             " period=" + format_double(f.period) + " phase=" + format_double(f.phase) +
             " noise_sd=" + format_double(f.noise_sd);
      } else if (!f.derived_from.empty()) {
        v += " threshold " + f.derived_from + ">" + format_double(f.threshold) + " states=" + join(f.states, ",");
      } else {
        std::vector<std::string> rows;
        for (const auto& row : f.transition) {
          std::vector<std::string> cells;
          for (double x : row) cells.push_back(format_double(x));
          rows.push_back(join(cells, ","));
        }
        v += " markov states=" + join(f.states, ",") + " transition=" + join(rows, ";");
      }
      kv.add("feature", v);
    }
  }
  return kv.to_text();
}

bool AttackScenario::targets(std::string_view sensor) const {
  return sensors.empty() || std::find(sensors.begin(), sensors.end(), sensor) != sensors.end();
}

void SynthConfig::validate() const {
  if (length == 0) throw ConfigError("synthetic length must be at least 1");
  for (const auto& p : profiles) p.validate();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& a = scenarios[i];
    const std::string tag = "scenario " + std::to_string(i + 1);
    if (a.kind < 0 || a.kind >= static_cast<int>(kAttackKinds.size())) throw ScenarioError(tag + ": unknown attack kind");
    if (a.start >= a.end) throw ScenarioError(tag + ": empty interval");
    if (a.end > length) throw ScenarioError(tag + ": interval ends past the series length " + std::to_string(length));
    if (!(a.severity > 0.0)) throw ScenarioError(tag + ": severity must be positive");
    for (const auto& s : a.sensors) {
      if (std::none_of(profiles.begin(), profiles.end(), [&](const SensorProfile& p) { return p.name == s; })) {
        throw ScenarioError(tag + ": unknown sensor '" + s + "'");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& b = scenarios[j];
      if (a.start >= b.end || b.start >= a.end) continue;
      for (const auto& p : profiles) {
        if (a.targets(p.name) && b.targets(p.name)) {
          throw ScenarioError(tag + " overlaps scenario " + std::to_string(j + 1) + " on sensor " + p.name);
        }
      }
    }
  }
}

SynthConfig SynthConfig::parse(const KeyValueFile& kv) {
  SynthConfig cfg;
  const auto length = kv.get_int("length", 1000);
  if (length < 1) throw ConfigError("length must be at least 1");
  cfg.length = static_cast<std::size_t>(length);
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 1));
  for (const auto& line : kv.get_all("scenario")) {
    std::vector<std::string> parts;
    for (auto& p : split(line, ' ')) {
      if (!trim(p).empty()) parts.emplace_back(trim(p));
    }
    if (parts.size() < 4 || parts.size() > 5) {
      throw ScenarioError("scenario needs 'kind start end severity [sensors]': " + line);
    }
    AttackScenario a;
    try {
      a.kind = attack_kind_code(parts[0]);
    } catch (const EncodeError&) {
      throw ScenarioError("unknown attack kind '" + parts[0] + "'");
    }
    if (a.kind == kNoAttack) throw ScenarioError("scenario kind cannot be normal");
    const auto start = parse_int(parts[1]);
    const auto end = parse_int(parts[2]);
    const auto sev = parse_double(parts[3]);
    if (!start || !end || !sev || *start < 0 || *end < 0) throw ScenarioError("bad scenario numbers: " + line);
    a.start = static_cast<std::size_t>(*start);
    a.end = static_cast<std::size_t>(*end);
    a.severity = *sev;
    if (parts.size() == 5 && parts[4] != "all") {
      for (auto& s : split(parts[4], ',')) a.sensors.emplace_back(trim(s));
    }
    cfg.scenarios.push_back(std::move(a));
  }
  cfg.validate();
  return cfg;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("scenario file not found: " + path.string());
  return parse(KeyValueFile::load(path));
}

KeyValueFile SynthConfig::to_kv() const {
  KeyValueFile kv;
  kv.add("length", std::to_string(length));
  kv.add("seed", std::to_string(seed));
  for (const auto& a : scenarios) {
    kv.add("scenario", std::string(kAttackKinds[static_cast<std::size_t>(a.kind)]) + " " + std::to_string(a.start) +
                           " " + std::to_string(a.end) + " " + format_double(a.severity) + " " +
                           (a.sensors.empty() ? std::string("all") : join(a.sensors, ",")));
  }
  return kv;
}

SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.length;
  SynthOutput out;
  out.timestamps.resize(n);
  const double period = cfg.profiles.empty() ? 60.0 : cfg.profiles.front().sample_period;
  for (std::size_t t = 0; t < n; ++t) out.timestamps[t] = kEpochStart + static_cast<double>(t) * period;

  // Which scenario (if any) covers each row of each sensor.
  std::vector<int> combined_scenario(n, -1);
  for (std::size_t i = cfg.scenarios.size(); i-- > 0;) {
    for (std::size_t t = cfg.scenarios[i].start; t < cfg.scenarios[i].end; ++t) combined_scenario[t] = static_cast<int>(i);
  }

  for (std::size_t si = 0; si < cfg.profiles.size(); ++si) {
    const auto& prof = cfg.profiles[si];
    Rng rng = Rng::derive(cfg.seed, 2 * si);
    Rng attack_rng = Rng::derive(cfg.seed, 2 * si + 1);
    std::vector<int> active(n, -1);
    for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) {
      const auto& a = cfg.scenarios[i];
      if (!a.targets(prof.name)) continue;
      for (std::size_t t = a.start; t < a.end; ++t) active[t] = static_cast<int>(i);
    }

    SensorTrace trace;
    trace.profile = prof;
    auto& ds = trace.data;
    for (const auto& f : prof.features) {
      Column col;
      col.name = f.name;
      col.kind = f.kind;
      col.vocabulary = f.kind == FeatureKind::categorical ? f.states : std::vector<std::string>{};
      col.values.resize(n);
      ds.columns.push_back(std::move(col));
    }
    std::vector<std::size_t> state(prof.features.size(), 0);
    for (std::size_t t = 0; t < n; ++t) {
      const int sc = active[t];
      for (std::size_t fi = 0; fi < prof.features.size(); ++fi) {
        const auto& f = prof.features[fi];
        double v;
        if (f.kind == FeatureKind::numeric) {
          v = f.base + f.amplitude * std::sin(2.0 * std::numbers::pi * (static_cast<double>(t) / f.period + f.phase)) +
              f.noise_sd * rng.normal();
          if (sc >= 0) {
            const auto& a = cfg.scenarios[static_cast<std::size_t>(sc)];
            v = perturb(a.kind, v, f, fi, a.severity, t - a.start, a.end - a.start, attack_rng);
          }
        } else if (!f.derived_from.empty()) {
          const double src = ds.column(f.derived_from).values[t];
          v = src > f.threshold ? 1.0 : 0.0;
        } else {
          std::size_t next = t == 0 ? 0 : step_state(f, state[fi], rng);
          if (sc >= 0) {
            const auto& a = cfg.scenarios[static_cast<std::size_t>(sc)];
            const std::size_t last = f.states.size() - 1;
            switch (a.kind) {
              case 0: case 1: case 2: case 8: next = last; break;           // stuck
              case 6: case 7: next = (state[fi] + 1) % f.states.size(); break;  // flipping
              default: next = (next + 1) % f.states.size(); break;        // inverted
            }
          }
          state[fi] = next;
          v = static_cast<double>(next);
        }
        ds.columns[fi].values[t] = v;
      }
      ds.labels.push_back(sc >= 0 ? kAttackLabel : kNormalLabel);
      ds.attack_types.push_back(sc >= 0 ? cfg.scenarios[static_cast<std::size_t>(sc)].kind : kNoAttack);
    }
    out.sensors.push_back(std::move(trace));
  }

  for (const auto& s : out.sensors) {
    for (const auto& c : s.data.columns) out.combined.columns.push_back(c);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const int sc = combined_scenario[t];
    out.combined.labels.push_back(sc >= 0 ? kAttackLabel : kNormalLabel);
    out.combined.attack_types.push_back(sc >= 0 ? cfg.scenarios[static_cast<std::size_t>(sc)].kind : kNoAttack);
  }
  return out;
}

namespace {

std::string raw_csv(const TabularDataset& ds, const std::vector<double>& timestamps) {
  std::vector<std::string> header{"ts", "date", "time"};
  for (const auto& c : ds.columns) header.push_back(c.name);
  header.emplace_back("label");
  header.emplace_back("type");
  std::string out = format_csv_row(header) + "\n";
  for (std::size_t t = 0; t < ds.rows(); ++t) {
    const auto ts = static_cast<long long>(timestamps[t]);
    std::vector<std::string> row{std::to_string(ts), civil_date(ts / 86400), clock_time(ts % 86400)};
    for (const auto& c : ds.columns) {
      row.push_back(c.kind == FeatureKind::categorical ? c.vocabulary[static_cast<std::size_t>(c.values[t])]
                                                       : fixed4(c.values[t]));
    }
    row.push_back(std::to_string(ds.labels[t]));
    const int type = ds.attack_types[t];
    row.push_back(type == kNoAttack ? "normal" : std::string(kAttackKinds[static_cast<std::size_t>(type)]));
    out += format_csv_row(row) + "\n";
  }
  return out;
}

}  // namespace

std::string SynthOutput::sensor_csv(std::size_t sensor) const { return raw_csv(sensors.at(sensor).data, timestamps); }

std::string SynthOutput::combined_csv() const { return raw_csv(combined, timestamps); }

SensorSchema SynthOutput::combined_schema() const {
  SensorSchema s;
  s.sensor = "combined";
  for (const auto& t : sensors) {
    auto part = t.profile.schema();
    s.features.insert(s.features.end(), part.features.begin(), part.features.end());
  }
  s.normal_value = std::to_string(kNormalLabel);
  s.attack_type_column = "type";
  return s;
}

void SynthOutput::save(const std::filesystem::path& dir) const {
  std::vector<SensorProfile> profiles;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const auto& name = sensors[i].profile.name;
    write_file(dir / "sensors" / (name + ".csv"), sensor_csv(i));
    write_file(dir / "sensors" / (name + ".schema"), sensors[i].profile.schema().to_text());
    profiles.push_back(sensors[i].profile);
  }
  write_file(dir / "combined" / "combined.csv", combined_csv());
  write_file(dir / "combined" / "combined.schema", combined_schema().to_text());
  write_file(dir / "profiles.txt", profiles_text(profiles));
}

std::vector<std::string> benchmark_names() { return {"separable-small", "transfer-pair", "imbalanced"}; }

std::vector<BenchmarkPart> make_benchmark(std::string_view name, std::uint64_t seed) {
  auto scenario = [](std::string_view kind, std::size_t start, std::size_t end, double severity) {
    AttackScenario a;
    a.kind = attack_kind_code(kind);
    a.start = start;
    a.end = end;
    a.severity = severity;
    return a;
  };
  if (name == "separable-small") {
    // Upward shifts only, so a linear boundary exists on the raw features.
    SynthConfig cfg;
    cfg.length = 500;
    cfg.seed = seed;
    cfg.scenarios = {scenario("dos", 40, 80, 2.0), scenario("mitm", 150, 190, 2.0),
                     scenario("xss", 260, 295, 2.0), scenario("backdoor", 380, 415, 2.0)};
    return {{"data", cfg}};
  }
  if (name == "transfer-pair") {
    SynthConfig source;
    source.length = 5000;
    source.seed = seed;
    std::size_t start = 200;
    for (std::size_t k = 0; k < kAttackKinds.size(); ++k) {
      source.scenarios.push_back(scenario(kAttackKinds[k], start, start + 150, 1.0));
      start += 530;
    }
    SynthConfig target;
    target.length = 100;
    target.seed = seed ^ 0x5bd1e995u;
    target.scenarios = {scenario("backdoor", 15, 40, 0.6), scenario("ransomware", 60, 85, 0.6)};
    return {{"source", source}, {"target", target}};
  }
  if (name == "imbalanced") {
    SynthConfig cfg;
    cfg.length = 2000;
    cfg.seed = seed;
    std::size_t start = 100;
    for (std::size_t k = 0; k < kAttackKinds.size(); ++k) {
      const std::size_t len = k + 1 < kAttackKinds.size() ? 67 : 64;  // 600 rows in total
      cfg.scenarios.push_back(scenario(kAttackKinds[k], start, start + len, 1.5));
      start += 210;
    }
    return {{"data", cfg}};
  }
  throw ConfigError("unknown benchmark '" + std::string(name) + "' (expected separable-small, transfer-pair or imbalanced)");
}

std::vector<std::string> transfer_channels() {
  return {"fridge_temperature", "latitude", "light_status", "door_state",
          "fc1_read_input_register", "current_temperature", "temperature"};
}

}  // namespace dtids
