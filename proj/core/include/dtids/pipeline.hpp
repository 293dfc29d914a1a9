#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtids/dataset.hpp"
#include "dtids/domain.hpp"
#include "dtids/split.hpp"
#include "dtids/tensor.hpp"
#include "dtids/transfer.hpp"

namespace dtids {

// ---- ingestion and encoding -------------------------------------------------

struct SourceFile {
  std::filesystem::path path;
  SensorSchema schema;
};

/// Parses one CSV against its schema. Time columns and dropped columns are
/// discarded; any other undeclared column is a SchemaError naming it. Empty
/// cells become missing values. Raw labels equal to schema.normal_value map
/// to kNormalLabel, everything else to kAttackLabel.
TabularDataset ingest_text(std::string_view text, const SensorSchema& schema,
                           const std::string& source = "<csv>");

/// Concatenates the files row-wise. The column set is the union over all
/// files in order of first appearance; columns a file lacks are missing in
/// its rows. A name declared with different kinds or vocabularies is a
/// SchemaError.
TabularDataset ingest(std::span<const SourceFile> files);

/// Replaces categorical text by its index in the declared vocabulary.
/// Throws EncodeError for values outside the vocabulary.
void encode_labels(TabularDataset& ds);

// ---- outliers ---------------------------------------------------------------

struct EsdResult {
  std::vector<std::size_t> outliers;  // indices into the input, in removal order
  std::vector<double> statistics;     // R_i, one per completed step
  std::vector<double> critical;       // lambda_i
};

/// Generalized extreme studentized deviate test (Rosner). Missing values are
/// skipped. Throws TestInapplicableError when fewer than 15 values remain and
/// ConfigError unless 1 <= max_outliers <= n - 3 and alpha is in (0, 1).
EsdResult detect_outliers_esd(std::span<const double> column, double alpha = 0.05,
                              std::size_t max_outliers = 10);

// ---- imputation -------------------------------------------------------------

/// Per-column medians of a reference split.
struct Imputer {
  std::vector<std::string> names;
  std::vector<double> medians;

  /// Throws ImputeError when a column has no observed value.
  static Imputer fit(const TabularDataset& train);
  /// Fills missing cells; a dataset without missing cells is left untouched.
  void apply(TabularDataset& ds) const;
};

// ---- correlation ------------------------------------------------------------

/// Pearson product-moment correlation. Throws UndefinedStatisticError for a
/// constant input and ShapeError when lengths differ or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

struct PruneReport {
  std::vector<std::string> names;       // columns examined, in order
  std::vector<double> correlation;      // names.size()^2, row-major; NaN where undefined
  std::vector<std::string> constant;    // dropped because constant
  std::vector<std::pair<std::string, std::string>> redundant;  // (dropped, kept)

  std::vector<std::string> dropped() const;
  std::string correlation_csv() const;
  std::string dropped_text() const;
};

/// Drops constant columns, then for every pair with |r| > threshold the later
/// column. Throws ConfigError unless threshold is in (0, 1].
PruneReport prune_redundant(TabularDataset& ds, double threshold = 0.95);

// ---- scaling ----------------------------------------------------------------

/// Min-max scaler fitted on the training split.
struct Scaler {
  std::vector<std::string> names;
  std::vector<double> min, max;

  /// Throws UndefinedStatisticError for a constant feature.
  static Scaler fit(const TabularDataset& train);
  /// (x - min) / (max - min), clamped to [0, 1]. Column names must match.
  void transform(TabularDataset& ds) const;
  double scale(std::size_t feature, double x) const;

  std::string to_text() const;
  static Scaler parse(std::string_view text, const std::string& source = "<scaler>");
  static Scaler load(const std::filesystem::path& path);
};

// ---- splitting and tensors --------------------------------------------------

/// Stratified 64/16/20 split on the binary label. Needs at least 10 rows.
SplitIndices split_dataset(const TabularDataset& ds, std::uint64_t seed);

enum class Task { binary, multiclass };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);
/// Classes of a task: 2, or the nine attack kinds plus normal.
std::size_t task_classes(Task task);
/// Per-row class: the label, or the attack code with normal rows mapped to 9.
std::vector<int> task_targets(const TabularDataset& ds, Task task);

/// Tabular rows as channels: Tensor[N, F, L] where every channel repeats the
/// feature value L times.
Tensor to_model_input(const TabularDataset& ds, std::size_t length);
/// Same, checking the feature count against the expected channel count.
Tensor to_model_input(const TabularDataset& ds, std::size_t length, std::size_t channels);
Domain to_domain(const TabularDataset& ds, std::size_t length, Task task = Task::binary,
                 DomainRole role = DomainRole::source);

/// Windowed path: the named columns become channels of one aligned series,
/// segmented jointly.
Domain windowed_domain(const TabularDataset& ds, const std::vector<std::string>& channels,
                       const SegmentationConfig& cfg);

// ---- orchestration ----------------------------------------------------------

struct PrepareConfig {
  std::uint64_t seed = 1;
  double esd_alpha = 0.05;
  std::size_t esd_max_outliers = 10;
  double prune_threshold = 0.95;

  void validate() const;
};

struct OutlierReport {
  std::string column;
  bool applicable = true;
  std::vector<std::size_t> rows;
};

struct PreparedData {
  TabularDataset train, val, test;
  SplitIndices split;
  Imputer imputer;
  PruneReport prune;
  Scaler scaler;
  std::vector<OutlierReport> outliers;

  /// Writes train.csv, val.csv, test.csv, scaler.txt, imputer.txt,
  /// correlation.csv, dropped.txt, outliers.csv and summary.txt.
  void save(const std::filesystem::path& dir) const;
};

/// ingest -> encode -> outlier report -> split -> impute -> prune -> scale.
/// Imputer, pruning and scaler are fitted on the training split only.
/// Outliers are reported, not removed.
PreparedData prepare(const TabularDataset& raw, const PrepareConfig& cfg);

/// Reads {train,val,test}.csv from a prepared directory.
struct PreparedSplits {
  TabularDataset train, val, test;
  static PreparedSplits load(const std::filesystem::path& dir);
};

/// Every `<name>.schema` in the directory paired with `<name>.csv` in the
/// data directory, in name order. Throws ConfigError when a CSV is missing or
/// the schema directory holds no schema.
std::vector<SourceFile> discover_sources(const std::filesystem::path& data_dir,
                                         const std::filesystem::path& schema_dir);

}  // namespace dtids
