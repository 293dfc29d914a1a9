#include "dtids/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "dtids/csv.hpp"
#include "dtids/error.hpp"

namespace dtids {

namespace {

bool is_time_column(std::string_view name) {
  return std::find(kTimeColumns.begin(), kTimeColumns.end(), name) != kTimeColumns.end();
}

std::string cell_ref(const std::string& source, std::size_t row, const std::string& column) {
  return source + ": row " + std::to_string(row + 2) + ", column '" + column + "'";
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TabularDataset ingest_text(std::string_view text, const SensorSchema& schema, const std::string& source) {
  schema.validate();
  const CsvTable table = parse_csv(text, source);
  const auto& header = table.header;

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!position.emplace(header[i], i).second) {
      throw SchemaError(source + ": duplicate column '" + header[i] + "'");
    }
  }
  for (const auto& name : header) {
    const bool known =
        is_time_column(name) || name == schema.label_column || name == schema.attack_type_column ||
        std::find(schema.dropped.begin(), schema.dropped.end(), name) != schema.dropped.end() ||
        std::any_of(schema.features.begin(), schema.features.end(),
                    [&](const FeatureSpec& f) { return f.name == name; });
    if (!known) throw SchemaError(source + ": column '" + name + "' is not declared in schema " + schema.sensor);
  }
  for (const auto& f : schema.features) {
    if (!position.count(f.name)) throw SchemaError(source + ": declared column '" + f.name + "' is missing");
  }
  if (!position.count(schema.label_column)) {
    throw SchemaError(source + ": label column '" + schema.label_column + "' is missing");
  }
  const std::size_t label_pos = position.at(schema.label_column);
  const bool has_type = !schema.attack_type_column.empty() && position.count(schema.attack_type_column);
  const std::size_t type_pos = has_type ? position.at(schema.attack_type_column) : 0;

  TabularDataset ds;
  const std::size_t n = table.rows.size();
  for (const auto& f : schema.features) {
    Column col;
    col.name = f.name;
    col.kind = f.kind;
    col.vocabulary = f.vocabulary;
    const std::size_t p = position.at(f.name);
    if (f.kind == FeatureKind::categorical) {
      col.values.assign(n, kMissing);
      col.text.reserve(n);
      for (const auto& row : table.rows) col.text.push_back(row[p]);
    } else {
      col.values.reserve(n);
      for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = table.rows[r][p];
        if (cell.empty()) {
          col.values.push_back(kMissing);
          continue;
        }
        const auto v = parse_double(cell);
        if (!v || !std::isfinite(*v)) throw IngestError(cell_ref(source, r, f.name) + ": not a number: " + cell);
        col.values.push_back(*v);
      }
    }
    ds.columns.push_back(std::move(col));
  }
  ds.labels.reserve(n);
  ds.attack_types.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& raw = table.rows[r][label_pos];
    if (raw.empty()) throw IngestError(cell_ref(source, r, schema.label_column) + ": missing label");
    ds.labels.push_back(raw == schema.normal_value ? kNormalLabel : kAttackLabel);
    int type = kNoAttack;
    if (has_type) {
      try {
        type = attack_kind_code(table.rows[r][type_pos]);
      } catch (const EncodeError& e) {
        throw IngestError(cell_ref(source, r, schema.attack_type_column) + ": " + e.what());
      }
    }
    ds.attack_types.push_back(type);
  }
  return ds;
}

TabularDataset ingest(std::span<const SourceFile> files) {
  if (files.empty()) throw ConfigError("nothing to ingest");
  std::vector<TabularDataset> parts;
  for (const auto& f : files) {
    if (!std::filesystem::exists(f.path)) throw ConfigError("data file not found: " + f.path.string());
    parts.push_back(ingest_text(read_file(f.path), f.schema, f.path.string()));
  }
  TabularDataset out;
  for (const auto& part : parts) {
    for (const auto& c : part.columns) {
      auto it = std::find_if(out.columns.begin(), out.columns.end(),
                             [&](const Column& o) { return o.name == c.name; });
      if (it == out.columns.end()) {
        Column col;
        col.name = c.name;
        col.kind = c.kind;
        col.vocabulary = c.vocabulary;
        out.columns.push_back(std::move(col));
      } else if (it->kind != c.kind || it->vocabulary != c.vocabulary) {
        throw SchemaError("column '" + c.name + "' is declared differently by two schemas");
      }
    }
  }
  for (const auto& part : parts) {
    const std::size_t n = part.rows();
    for (auto& col : out.columns) {
      auto it = std::find_if(part.columns.begin(), part.columns.end(),
                             [&](const Column& c) { return c.name == col.name; });
      const bool categorical = col.kind == FeatureKind::categorical;
      if (it == part.columns.end()) {
        col.values.insert(col.values.end(), n, kMissing);
        if (categorical) col.text.insert(col.text.end(), n, std::string());
      } else {
        col.values.insert(col.values.end(), it->values.begin(), it->values.end());
        if (categorical) col.text.insert(col.text.end(), it->text.begin(), it->text.end());
      }
    }
    out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
    out.attack_types.insert(out.attack_types.end(), part.attack_types.begin(), part.attack_types.end());
  }
  return out;
}

void encode_labels(TabularDataset& ds) {
  for (auto& col : ds.columns) {
    if (col.encoded()) continue;
    for (std::size_t r = 0; r < col.text.size(); ++r) {
      const auto& cell = col.text[r];
      if (cell.empty()) {
        col.values[r] = kMissing;
        continue;
      }
      auto it = std::find(col.vocabulary.begin(), col.vocabulary.end(), cell);
      if (it == col.vocabulary.end()) {
        throw EncodeError("row " + std::to_string(r) + ", column '" + col.name + "': value '" + cell +
                          "' is not in the vocabulary {" + join(col.vocabulary, ",") + "}");
      }
      col.values[r] = static_cast<double>(it - col.vocabulary.begin());
    }
    col.text.clear();
  }
}

EsdResult detect_outliers_esd(std::span<const double> column, double alpha, std::size_t max_outliers) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("ESD alpha must be in (0, 1)");
  if (max_outliers < 1) throw ConfigError("ESD max_outliers must be at least 1");
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!Column::is_missing(column[i])) alive.push_back(i);
  }
  const std::size_t n = alive.size();
  if (n < 15) {
    throw TestInapplicableError("ESD needs at least 15 observations, got " + std::to_string(n));
  }
  if (max_outliers > n - 3) throw ConfigError("ESD max_outliers must not exceed n - 3");

  EsdResult result;
  std::vector<std::size_t> removed;
  std::size_t significant = 0;
  for (std::size_t step = 1; step <= max_outliers; ++step) {
    const double m = static_cast<double>(alive.size());
    double mean = 0.0;
    for (auto i : alive) mean += column[i];
    mean /= m;
    double ss = 0.0;
    for (auto i : alive) ss += (column[i] - mean) * (column[i] - mean);
    const double sd = std::sqrt(ss / (m - 1.0));
    if (sd == 0.0) break;

    std::size_t worst = 0;
    double dev = -1.0;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      const double d = std::abs(column[alive[k]] - mean);
      if (d > dev) {
        dev = d;
        worst = k;
      }
    }
    const double nd = static_cast<double>(n);
    const double i = static_cast<double>(step);
    const double p = 1.0 - alpha / (2.0 * (nd - i + 1.0));
    const boost::math::students_t dist(nd - i - 1.0);
    const double t = boost::math::quantile(dist, p);
    const double lambda = (nd - i) * t / std::sqrt((nd - i - 1.0 + t * t) * (nd - i + 1.0));

    result.statistics.push_back(dev / sd);
    result.critical.push_back(lambda);
    if (dev / sd > lambda) significant = step;
    removed.push_back(alive[worst]);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  result.outliers.assign(removed.begin(), removed.begin() + static_cast<std::ptrdiff_t>(significant));
  return result;
}

Imputer Imputer::fit(const TabularDataset& train) {
  if (!train.encoded()) throw ImputeError("impute needs an encoded dataset");
  Imputer imp;
  for (const auto& col : train.columns) {
    std::vector<double> seen;
    for (double v : col.values) {
      if (!Column::is_missing(v)) seen.push_back(v);
    }
    if (seen.empty()) throw ImputeError("column '" + col.name + "' has no observed value to impute from");
    imp.names.push_back(col.name);
    imp.medians.push_back(median_of(std::move(seen)));
  }
  return imp;
}

void Imputer::apply(TabularDataset& ds) const {
  for (auto& col : ds.columns) {
    auto it = std::find(names.begin(), names.end(), col.name);
    if (it == names.end()) throw ImputeError("imputer was not fitted on column '" + col.name + "'");
    const double fill = medians[static_cast<std::size_t>(it - names.begin())];
    for (double& v : col.values) {
      if (Column::is_missing(v)) v = fill;
    }
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("pearson: columns differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw ShapeError("pearson needs at least two observations");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatisticError("pearson: constant column");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<std::string> PruneReport::dropped() const {
  std::vector<std::string> out = constant;
  for (const auto& [gone, kept] : redundant) out.push_back(gone);
  return out;
}

std::string PruneReport::correlation_csv() const {
  std::vector<std::string> header{"feature"};
  header.insert(header.end(), names.begin(), names.end());
  std::string out = format_csv_row(header) + "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> row{names[i]};
    for (std::size_t j = 0; j < names.size(); ++j) {
      const double r = correlation[i * names.size() + j];
      row.push_back(std::isnan(r) ? "" : format_double(r));
    }
    out += format_csv_row(row) + "\n";
  }
  return out;
}

std::string PruneReport::dropped_text() const {
  KeyValueFile kv;
  for (const auto& c : constant) kv.add("constant", c);
  for (const auto& [gone, kept] : redundant) kv.add("redundant", gone + " " + kept);
  return kv.to_text();
}

PruneReport prune_redundant(TabularDataset& ds, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("prune threshold must be in (0, 1]");
  if (!ds.encoded()) throw EncodeError("prune needs an encoded dataset");
  PruneReport report;
  report.names = ds.column_names();
  const std::size_t f = ds.features();
  report.correlation.assign(f * f, std::nan(""));

  std::vector<bool> is_constant(f, false);
  for (std::size_t i = 0; i < f; ++i) {
    const auto& v = ds.columns[i].values;
    is_constant[i] = v.empty() || std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    if (is_constant[i]) report.constant.push_back(ds.columns[i].name);
  }
  for (std::size_t i = 0; i < f; ++i) {
    if (is_constant[i]) continue;
    report.correlation[i * f + i] = 1.0;
    for (std::size_t j = i + 1; j < f; ++j) {
      if (is_constant[j]) continue;
      const double r = pearson(ds.columns[i].values, ds.columns[j].values);
      report.correlation[i * f + j] = r;
      report.correlation[j * f + i] = r;
    }
  }
  std::vector<bool> drop = is_constant;
  for (std::size_t j = 0; j < f; ++j) {
    if (drop[j]) continue;
    for (std::size_t i = 0; i < j; ++i) {
      if (drop[i]) continue;
      if (std::abs(report.correlation[i * f + j]) > threshold) {
        drop[j] = true;
        report.redundant.emplace_back(ds.columns[j].name, ds.columns[i].name);
        break;
      }
    }
  }
  ds.drop_columns(report.dropped());
  return report;
}

Scaler Scaler::fit(const TabularDataset& train) {
  if (!train.encoded() || train.has_missing()) throw DataError("scaler needs an encoded dataset without missing values");
  if (train.rows() == 0) throw EmptyDomainError("cannot fit a scaler on an empty split");
  Scaler s;
  for (const auto& col : train.columns) {
    const auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
    if (*lo == *hi) throw UndefinedStatisticError("feature '" + col.name + "' is constant and cannot be scaled");
    s.names.push_back(col.name);
    s.min.push_back(*lo);
    s.max.push_back(*hi);
  }
  return s;
}

double Scaler::scale(std::size_t feature, double x) const {
  return std::clamp((x - min[feature]) / (max[feature] - min[feature]), 0.0, 1.0);
}

void Scaler::transform(TabularDataset& ds) const {
  if (ds.column_names() != names) throw SchemaError("dataset columns do not match the fitted scaler");
  for (std::size_t c = 0; c < names.size(); ++c) {
    for (double& v : ds.columns[c].values) v = scale(c, v);
  }
}

std::string Scaler::to_text() const {
  KeyValueFile kv;
  for (std::size_t i = 0; i < names.size(); ++i) kv.add(names[i], format_double(min[i]) + " " + format_double(max[i]));
  return kv.to_text();
}

Scaler Scaler::parse(std::string_view text, const std::string& source) {
  const auto kv = KeyValueFile::parse(text, source);
  Scaler s;
  for (const auto& e : kv.entries()) {
    std::vector<std::string> parts;
    for (auto& p : split(e.value, ' ')) {
      if (!trim(p).empty()) parts.emplace_back(trim(p));
    }
    const auto lo = parts.size() == 2 ? parse_double(parts[0]) : std::nullopt;
    const auto hi = parts.size() == 2 ? parse_double(parts[1]) : std::nullopt;
    if (!lo || !hi || !(*hi >= *lo)) throw FormatError(source + ": bad scaler entry for '" + e.key + "'");
    s.names.push_back(e.key);
    s.min.push_back(*lo);
    s.max.push_back(*hi);
  }
  return s;
}

Scaler Scaler::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("scaler file not found: " + path.string());
  return parse(read_file(path), path.string());
}

SplitIndices split_dataset(const TabularDataset& ds, std::uint64_t seed) {
  if (ds.rows() < 10) throw StratificationError("split needs at least 10 rows, got " + std::to_string(ds.rows()));
  return stratified_split(ds.labels, seed);
}

std::string_view to_string(Task task) { return task == Task::binary ? "binary" : "multiclass"; }

Task parse_task(std::string_view name) {
  if (name == "binary") return Task::binary;
  if (name == "multiclass") return Task::multiclass;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected binary or multiclass)");
}

std::size_t task_classes(Task task) { return task == Task::binary ? 2 : kAttackKinds.size() + 1; }

std::vector<int> task_targets(const TabularDataset& ds, Task task) {
  if (task == Task::binary) return ds.labels;
  std::vector<int> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const int type = ds.attack_types.empty() ? kNoAttack : ds.attack_types[r];
    if (ds.labels[r] == kNormalLabel) {
      out[r] = static_cast<int>(kAttackKinds.size());
    } else if (type == kNoAttack) {
      throw DataError("row " + std::to_string(r) + " is an attack without an attack type");
    } else {
      out[r] = type;
    }
  }
  return out;
}

Tensor to_model_input(const TabularDataset& ds, std::size_t length) {
  if (length == 0) throw ConfigError("model input length must be positive");
  if (ds.rows() == 0 || ds.features() == 0) throw EmptyDomainError("dataset has no rows or no features");
  if (!ds.encoded() || ds.has_missing()) throw DataError("model input needs a prepared dataset");
  const std::size_t n = ds.rows(), f = ds.features();
  Tensor x({n, f, length});
  double* out = x.raw();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < f; ++c) {
      std::fill_n(out + (r * f + c) * length, length, ds.columns[c].values[r]);
    }
  }
  return x;
}

Tensor to_model_input(const TabularDataset& ds, std::size_t length, std::size_t channels) {
  if (ds.features() != channels) {
    throw ShapeError("dataset has " + std::to_string(ds.features()) + " features but " +
                     std::to_string(channels) + " channels were declared");
  }
  return to_model_input(ds, length);
}

Domain to_domain(const TabularDataset& ds, std::size_t length, Task task, DomainRole role) {
  return Domain(role, to_model_input(ds, length), task_targets(ds, task), task_classes(task));
}

Domain windowed_domain(const TabularDataset& ds, const std::vector<std::string>& channels,
                       const SegmentationConfig& cfg) {
  MultiChannelSeries series;
  for (const auto& name : channels) series.channels.push_back(ds.column(name).values);
  series.labels = ds.labels;
  return build_target_domain(series, cfg);
}

void PrepareConfig::validate() const {
  if (!(esd_alpha > 0.0 && esd_alpha < 1.0)) throw ConfigError("esd_alpha must be in (0, 1)");
  if (esd_max_outliers < 1) throw ConfigError("esd_max_outliers must be at least 1");
  if (!(prune_threshold > 0.0 && prune_threshold <= 1.0)) throw ConfigError("prune_threshold must be in (0, 1]");
}

PreparedData prepare(const TabularDataset& raw, const PrepareConfig& cfg) {
  cfg.validate();
  TabularDataset ds = raw;
  encode_labels(ds);

  PreparedData out;
  for (const auto& col : ds.columns) {
    if (col.kind != FeatureKind::numeric) continue;
    OutlierReport rep;
    rep.column = col.name;
    try {
      const std::size_t observed = static_cast<std::size_t>(
          std::count_if(col.values.begin(), col.values.end(), [](double v) { return !Column::is_missing(v); }));
      const std::size_t cap = observed >= 3 ? std::min(cfg.esd_max_outliers, observed - 3) : 0;
      if (cap == 0) throw TestInapplicableError("too few observations");
      auto result = detect_outliers_esd(col.values, cfg.esd_alpha, cap);
      rep.rows = std::move(result.outliers);
      std::sort(rep.rows.begin(), rep.rows.end());
    } catch (const TestInapplicableError&) {
      rep.applicable = false;
    }
    out.outliers.push_back(std::move(rep));
  }

  out.split = split_dataset(ds, cfg.seed);
  out.train = ds.select_rows(out.split.train);
  out.val = ds.select_rows(out.split.val);
  out.test = ds.select_rows(out.split.test);

  out.imputer = Imputer::fit(out.train);
  for (auto* part : {&out.train, &out.val, &out.test}) out.imputer.apply(*part);

  out.prune = prune_redundant(out.train, cfg.prune_threshold);
  const auto gone = out.prune.dropped();
  out.val.drop_columns(gone);
  out.test.drop_columns(gone);
  if (out.train.features() == 0) throw DataError("every feature was pruned");

  out.scaler = Scaler::fit(out.train);
  for (auto* part : {&out.train, &out.val, &out.test}) out.scaler.transform(*part);
  return out;
}

void PreparedData::save(const std::filesystem::path& dir) const {
  write_file(dir / "train.csv", train.to_csv());
  write_file(dir / "val.csv", val.to_csv());
  write_file(dir / "test.csv", test.to_csv());
  write_file(dir / "scaler.txt", scaler.to_text());
  KeyValueFile imp;
  for (std::size_t i = 0; i < imputer.names.size(); ++i) imp.add(imputer.names[i], format_double(imputer.medians[i]));
  imp.save(dir / "imputer.txt");
  write_file(dir / "correlation.csv", prune.correlation_csv());
  write_file(dir / "dropped.txt", prune.dropped_text());

  std::string outl = "column,applicable,rows\n";
  for (const auto& o : outliers) {
    std::vector<std::string> rows;
    for (auto r : o.rows) rows.push_back(std::to_string(r));
    outl += format_csv_row({o.column, o.applicable ? "yes" : "no", join(rows, " ")}) + "\n";
  }
  write_file(dir / "outliers.csv", outl);

  KeyValueFile summary;
  summary.add("label_convention", "normal=1 attack=0");
  summary.add("train_rows", std::to_string(train.rows()));
  summary.add("val_rows", std::to_string(val.rows()));
  summary.add("test_rows", std::to_string(test.rows()));
  summary.add("features", std::to_string(train.features()));
  summary.save(dir / "summary.txt");
}

PreparedSplits PreparedSplits::load(const std::filesystem::path& dir) {
  PreparedSplits s;
  const std::pair<const char*, TabularDataset*> parts[] = {{"train.csv", &s.train}, {"val.csv", &s.val}, {"test.csv", &s.test}};
  for (const auto& [name, ds] : parts) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) throw ConfigError("prepared file not found: " + path.string());
    *ds = TabularDataset::from_csv(read_file(path), path.string());
  }
  if (s.train.column_names() != s.val.column_names() || s.train.column_names() != s.test.column_names()) {
    throw SchemaError(dir.string() + ": prepared splits have different columns");
  }
  return s;
}

std::vector<SourceFile> discover_sources(const std::filesystem::path& data_dir,
                                         const std::filesystem::path& schema_dir) {
  if (!std::filesystem::is_directory(schema_dir)) throw ConfigError("schema directory not found: " + schema_dir.string());
  std::vector<std::filesystem::path> schemas;
  for (const auto& e : std::filesystem::directory_iterator(schema_dir)) {
    if (e.path().extension() == ".schema") schemas.push_back(e.path());
  }
  std::sort(schemas.begin(), schemas.end());
  if (schemas.empty()) throw ConfigError("no .schema files in " + schema_dir.string());
  std::vector<SourceFile> out;
  for (const auto& s : schemas) {
    auto csv = data_dir / (s.stem().string() + ".csv");
    if (!std::filesystem::exists(csv)) throw ConfigError("data file not found: " + csv.string());
    out.push_back({csv, SensorSchema::load(s)});
  }
  return out;
}

}  // namespace dtids
