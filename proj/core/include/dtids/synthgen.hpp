#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dtids/dataset.hpp"
#include "dtids/text.hpp"

namespace dtids {

/// Generator of one feature column.
///
/// Numeric: base + amplitude * sin(2 pi (t / period + phase)) + N(0, noise_sd).
/// Categorical: Markov chain over `states` with row-stochastic `transition`,
/// unless `derived_from` names an earlier numeric feature of the same sensor,
/// in which case the state is states[1] when that feature exceeds
/// `threshold` and states[0] otherwise.
struct FeatureGenerator {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  double base = 0.0;
  double amplitude = 1.0;
  double period = 100.0;
  double phase = 0.0;
  double noise_sd = 0.1;
  std::vector<std::string> states;
  std::vector<std::vector<double>> transition;
  std::string derived_from;
  double threshold = 0.0;

  /// Typical half-width of the normal range: amplitude + 3 noise_sd.
  double span() const noexcept { return amplitude + 3.0 * noise_sd; }
};

struct SensorProfile {
  std::string name;
  std::vector<FeatureGenerator> features;
  double sample_period = 60.0;  // seconds between rows

  /// Throws ConfigError on negative noise, non-positive periods, bad
  /// transition matrices or dangling derived_from references.
  void validate() const;
  SensorSchema schema() const;
};

/// The seven telemetry sensors with their default waveform parameters.
std::vector<SensorProfile> default_profiles();
/// Human-readable dump of the profile parameters.
std::string profiles_text(const std::vector<SensorProfile>& profiles);

struct AttackScenario {
  int kind = 0;                      // index into kAttackKinds
  std::size_t start = 0, end = 0;    // rows [start, end)
  double severity = 1.0;             // distance from the normal range, in spans
  std::vector<std::string> sensors;  // empty = every sensor

  bool targets(std::string_view sensor) const;
};

struct SynthConfig {
  std::size_t length = 1000;
  std::uint64_t seed = 1;
  std::vector<AttackScenario> scenarios;
  std::vector<SensorProfile> profiles = default_profiles();

  /// Throws ScenarioError for intervals outside [0, length), empty intervals,
  /// unknown sensors, non-positive severity, or two scenarios overlapping on
  /// the same sensor; ConfigError for length 0.
  void validate() const;

  /// Scenario file:
  ///   length = 500
  ///   seed = 7
  ///   scenario = dos 40 80 2.0                 # kind start end severity
  ///   scenario = mitm 150 190 1.5 fridge,gps_tracker
  static SynthConfig parse(const KeyValueFile& kv);
  static SynthConfig load(const std::filesystem::path& path);
  KeyValueFile to_kv() const;
};

/// One sensor's rows: encoded feature values (categoricals as state codes),
/// labels and attack types.
struct SensorTrace {
  SensorProfile profile;
  TabularDataset data;
};

struct SynthOutput {
  std::vector<SensorTrace> sensors;
  /// All features side by side; a row is an attack when any sensor is
  /// attacked, typed by the earliest declared scenario covering it.
  TabularDataset combined;
  std::vector<double> timestamps;

  /// Raw CSV of one sensor (ts, date, time, features, label, type), with
  /// categoricals written as their state names.
  std::string sensor_csv(std::size_t sensor) const;
  std::string combined_csv() const;
  SensorSchema combined_schema() const;

  /// dir/sensors/<sensor>.{csv,schema}, dir/combined/combined.{csv,schema},
  /// dir/profiles.txt.
  void save(const std::filesystem::path& dir) const;
};

/// Pure function of the configuration: the same config gives identical output.
SynthOutput generate(const SynthConfig& cfg);

/// Named dataset bundles: separable-small (500 rows of strongly shifted
/// attacks), transfer-pair (5000-row source, 100-row target with different
/// attack kinds and weaker severity) and imbalanced (2000 rows, 30% attack).
struct BenchmarkPart {
  std::string name;
  SynthConfig config;
};

std::vector<BenchmarkPart> make_benchmark(std::string_view name, std::uint64_t seed);
std::vector<std::string> benchmark_names();

/// Channels used for windowed transfer experiments, one per sensor.
std::vector<std::string> transfer_channels();

}  // namespace dtids
