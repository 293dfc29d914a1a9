#include "dtids/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dtids/csv.hpp"
#include "dtids/error.hpp"

namespace dtids {

int attack_kind_code(std::string_view name) {
  std::string lower(trim(name));
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.empty() || lower == "normal") return kNoAttack;
  for (std::size_t i = 0; i < kAttackKinds.size(); ++i) {
    if (kAttackKinds[i] == lower) return static_cast<int>(i);
  }
  throw EncodeError("unknown attack type '" + std::string(name) + "'");
}

void SensorSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw SchemaError(sensor + ": feature with empty name");
    if (!seen.insert(f.name).second) throw SchemaError(sensor + ": duplicate feature '" + f.name + "'");
    if (f.kind == FeatureKind::categorical) {
      if (f.vocabulary.empty()) throw SchemaError(sensor + ": categorical '" + f.name + "' has no vocabulary");
      std::set<std::string> words(f.vocabulary.begin(), f.vocabulary.end());
      if (words.size() != f.vocabulary.size()) {
        throw SchemaError(sensor + ": vocabulary of '" + f.name + "' repeats a value");
      }
    }
  }
  if (label_column.empty()) throw SchemaError(sensor + ": label column name is empty");
  if (seen.count(label_column)) throw SchemaError(sensor + ": label column is also a feature");
}

std::string SensorSchema::to_text() const {
  KeyValueFile kv;
  kv.add("sensor", sensor);
  for (const auto& f : features) {
    std::string v = f.name + (f.kind == FeatureKind::numeric ? " numeric" : " categorical");
    if (f.kind == FeatureKind::categorical) v += " " + join(f.vocabulary, ",");
    kv.add("feature", v);
  }
  for (const auto& d : dropped) kv.add("drop", d);
  kv.add("label", label_column);
  kv.add("normal_label", normal_value);
  if (!attack_type_column.empty()) kv.add("attack_type", attack_type_column);
  return kv.to_text();
}

SensorSchema SensorSchema::parse(const KeyValueFile& kv) {
  SensorSchema s;
  s.sensor = kv.get_or("sensor", "sensor");
  for (const auto& entry : kv.get_all("feature")) {
    std::vector<std::string> parts;
    for (auto& p : split(entry, ' ')) {
      if (!trim(p).empty()) parts.emplace_back(trim(p));
    }
    if (parts.size() < 2) throw SchemaError(s.sensor + ": feature line needs 'name kind': " + entry);
    FeatureSpec f;
    f.name = parts[0];
    if (parts[1] == "numeric") {
      f.kind = FeatureKind::numeric;
      if (parts.size() != 2) throw SchemaError(s.sensor + ": numeric feature takes no vocabulary: " + entry);
    } else if (parts[1] == "categorical") {
      f.kind = FeatureKind::categorical;
      if (parts.size() != 3) throw SchemaError(s.sensor + ": categorical feature needs a vocabulary: " + entry);
      for (auto& w : split(parts[2], ',')) f.vocabulary.emplace_back(trim(w));
    } else {
      throw SchemaError(s.sensor + ": unknown feature kind '" + parts[1] + "'");
    }
    s.features.push_back(std::move(f));
  }
  for (const auto& d : kv.get_all("drop")) {
    for (auto& name : split(d, ',')) {
      if (!trim(name).empty()) s.dropped.emplace_back(trim(name));
    }
  }
  s.label_column = kv.get_or("label", "label");
  s.normal_value = kv.get_or("normal_label", "1");
  s.attack_type_column = kv.get_or("attack_type", "");
  s.validate();
  return s;
}

SensorSchema SensorSchema::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("schema file not found: " + path.string());
  return parse(KeyValueFile::load(path));
}

bool TabularDataset::encoded() const {
  return std::all_of(columns.begin(), columns.end(), [](const Column& c) { return c.encoded(); });
}

bool TabularDataset::has_missing() const {
  for (const auto& c : columns) {
    if (!c.encoded()) {
      for (const auto& t : c.text) {
        if (t.empty()) return true;
      }
    } else {
      for (double v : c.values) {
        if (Column::is_missing(v)) return true;
      }
    }
  }
  return false;
}

std::vector<std::string> TabularDataset::column_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

std::size_t TabularDataset::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw SchemaError("no column named '" + std::string(name) + "'");
}

TabularDataset TabularDataset::select_rows(std::span<const std::size_t> idx) const {
  TabularDataset out;
  for (const auto& c : columns) {
    Column col;
    col.name = c.name;
    col.kind = c.kind;
    col.vocabulary = c.vocabulary;
    if (c.encoded()) {
      col.values.reserve(idx.size());
      for (auto i : idx) col.values.push_back(c.values[i]);
    } else {
      col.values.assign(idx.size(), kMissing);
      col.text.reserve(idx.size());
      for (auto i : idx) col.text.push_back(c.text[i]);
    }
    out.columns.push_back(std::move(col));
  }
  for (auto i : idx) {
    out.labels.push_back(labels[i]);
    out.attack_types.push_back(attack_types.empty() ? kNoAttack : attack_types[i]);
  }
  return out;
}

void TabularDataset::drop_columns(const std::vector<std::string>& names) {
  std::erase_if(columns, [&](const Column& c) {
    return std::find(names.begin(), names.end(), c.name) != names.end();
  });
}

std::string TabularDataset::to_csv() const {
  if (!encoded()) throw EncodeError("dataset must be encoded before it is written");
  std::vector<std::string> header = column_names();
  header.emplace_back("label");
  header.emplace_back("attack_type");
  std::string out = format_csv_row(header) + "\n";
  std::vector<std::string> fields(header.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double v = columns[c].values[r];
      fields[c] = Column::is_missing(v) ? "" : format_double(v);
    }
    fields[columns.size()] = std::to_string(labels[r]);
    fields[columns.size() + 1] = std::to_string(attack_types.empty() ? kNoAttack : attack_types[r]);
    out += format_csv_row(fields) + "\n";
  }
  return out;
}

TabularDataset TabularDataset::from_csv(std::string_view text, const std::string& source) {
  const CsvTable table = parse_csv(text, source);
  const auto& h = table.header;
  if (h.size() < 3 || h[h.size() - 2] != "label" || h.back() != "attack_type") {
    throw FormatError(source + ": prepared data must end with label,attack_type columns");
  }
  TabularDataset ds;
  const std::size_t features = h.size() - 2;
  for (std::size_t c = 0; c < features; ++c) {
    Column col;
    col.name = h[c];
    col.values.reserve(table.rows.size());
    ds.columns.push_back(std::move(col));
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < features; ++c) {
      if (row[c].empty()) {
        ds.columns[c].values.push_back(kMissing);
        continue;
      }
      const auto v = parse_double(row[c]);
      if (!v) {
        throw IngestError(source + ": row " + std::to_string(r + 2) + ", column '" + h[c] +
                          "': not a number: " + row[c]);
      }
      ds.columns[c].values.push_back(*v);
    }
    const auto label = parse_int(row[features]);
    const auto type = parse_int(row[features + 1]);
    if (!label || (*label != 0 && *label != 1)) {
      throw IngestError(source + ": row " + std::to_string(r + 2) + ": label must be 0 or 1");
    }
    if (!type || *type < kNoAttack || *type >= static_cast<std::int64_t>(kAttackKinds.size())) {
      throw IngestError(source + ": row " + std::to_string(r + 2) + ": bad attack_type");
    }
    ds.labels.push_back(static_cast<int>(*label));
    ds.attack_types.push_back(static_cast<int>(*type));
  }
  return ds;
}

}  // namespace dtids
