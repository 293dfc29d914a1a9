#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtids/text.hpp"

namespace dtids {

/// The nine attack families, in this fixed order; attack-type codes index it.
inline constexpr std::array<std::string_view, 9> kAttackKinds{
    "dos", "ddos", "injection", "mitm", "backdoor", "password", "scanning", "xss", "ransomware"};
inline constexpr int kNoAttack = -1;

/// Code of an attack name (case-insensitive, "normal" and "" give kNoAttack).
/// Throws EncodeError for unknown names.
int attack_kind_code(std::string_view name);

/// Columns that never become features.
inline constexpr std::array<std::string_view, 4> kTimeColumns{"date", "time", "timestamp", "ts"};

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> vocabulary;  // categorical: value i is encoded as i
};

/// Declared layout of one sensor's CSV. Text form:
///
///   sensor = garage_door_sensor
///   feature = door_state categorical closed,open
///   feature = sphone_signal categorical false,true
///   drop = some_column
///   label = label          # label column name
///   normal_label = 1       # raw label value meaning "normal"
///   attack_type = type     # attack-type column name (optional)
struct SensorSchema {
  std::string sensor;
  std::vector<FeatureSpec> features;
  std::vector<std::string> dropped;
  std::string label_column = "label";
  std::string normal_value = "1";
  std::string attack_type_column = "type";

  /// Throws SchemaError on duplicate names or empty vocabularies.
  void validate() const;
  std::string to_text() const;
  static SensorSchema parse(const KeyValueFile& kv);
  /// Throws ConfigError naming the path when the file cannot be read.
  static SensorSchema load(const std::filesystem::path& path);
};

/// One feature column. Numeric cells live in `values` (NaN marks missing).
/// Categorical cells stay in `text` until encoded; after encoding `text` is
/// empty and `values` holds vocabulary codes.
struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> vocabulary;
  std::vector<double> values;
  std::vector<std::string> text;

  bool encoded() const noexcept { return text.empty(); }
  static bool is_missing(double v) noexcept { return v != v; }
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Column-major feature table with a binary label (1 = normal, 0 = attack)
/// and an optional attack-type code per row (kNoAttack when none).
struct TabularDataset {
  std::vector<Column> columns;
  std::vector<int> labels;
  std::vector<int> attack_types;

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t features() const noexcept { return columns.size(); }
  bool encoded() const;
  bool has_missing() const;
  std::vector<std::string> column_names() const;
  /// Index of the named column; throws SchemaError when absent.
  std::size_t index_of(std::string_view name) const;
  const Column& column(std::string_view name) const { return columns[index_of(name)]; }

  TabularDataset select_rows(std::span<const std::size_t> idx) const;
  void drop_columns(const std::vector<std::string>& names);

  /// Encoded dataset as CSV: feature columns, then label and attack_type.
  /// Values use shortest round-trip formatting, so output is deterministic.
  std::string to_csv() const;
  /// Reads the to_csv() layout back (all columns numeric).
  static TabularDataset from_csv(std::string_view text, const std::string& source = "<csv>");
};

}  // namespace dtids
