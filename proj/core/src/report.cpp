#include "dtids/report.hpp"

#include <cstdio>

#include "dtids/csv.hpp"
#include "dtids/error.hpp"

namespace dtids {

namespace {

double cell_number(const std::string& cell, const std::string& where) {
  const auto v = parse_double(cell);
  if (!v) throw FormatError(where + ": not a number: " + cell);
  return *v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string history_csv(const History& history) {
  std::string out = "epoch,train_acc,val_acc,train_loss,val_loss\n";
  for (const auto& r : history.epochs) {
    out += format_csv_row({std::to_string(r.epoch), format_double(r.train_accuracy), format_double(r.val_accuracy),
                           format_double(r.train_loss), format_double(r.val_loss)});
    out += '\n';
  }
  return out;
}

History parse_history_csv(std::string_view text, const std::string& source) {
  const CsvTable t = parse_csv(text, source);
  if (t.header != std::vector<std::string>{"epoch", "train_acc", "val_acc", "train_loss", "val_loss"}) {
    throw FormatError(source + ": unexpected history header");
  }
  History h;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = source + ": row " + std::to_string(i + 2);
    EpochRecord r;
    r.epoch = static_cast<int>(cell_number(row[0], where));
    r.train_accuracy = cell_number(row[1], where);
    r.val_accuracy = cell_number(row[2], where);
    r.train_loss = cell_number(row[3], where);
    r.val_loss = cell_number(row[4], where);
    h.epochs.push_back(r);
  }
  return h;
}

std::string epoch_timing_csv(const History& history) {
  std::string out = "epoch,seconds\n";
  for (const auto& r : history.epochs) out += std::to_string(r.epoch) + "," + format_double(r.seconds) + "\n";
  return out;
}

KeyValueFile metrics_to_kv(const MetricsReport& report) {
  KeyValueFile kv;
  kv.add("accuracy", format_double(report.accuracy));
  kv.add("precision", format_double(report.precision));
  kv.add("recall", format_double(report.recall));
  kv.add("f1", format_double(report.f1));
  kv.add("roc_auc", format_double(report.roc_auc));
  kv.add("params", std::to_string(report.params));
  kv.add("samples", std::to_string(report.confusion.total()));
  return kv;
}

MetricsReport metrics_from_kv(const KeyValueFile& kv) {
  MetricsReport r;
  auto num = [&](std::string_view key) {
    const auto v = parse_double(kv.require(key));
    if (!v) throw FormatError("metrics: '" + std::string(key) + "' is not a number");
    return *v;
  };
  r.accuracy = num("accuracy");
  r.precision = num("precision");
  r.recall = num("recall");
  r.f1 = num("f1");
  r.roc_auc = num("roc_auc");
  r.params = static_cast<std::size_t>(num("params"));
  return r;
}

std::string confusion_csv(const ConfusionMatrix& confusion) {
  std::vector<std::string> header{"truth"};
  for (std::size_t c = 0; c < confusion.classes(); ++c) header.push_back("pred_" + std::to_string(c));
  std::string out = format_csv_row(header) + "\n";
  for (std::size_t t = 0; t < confusion.classes(); ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (std::size_t p = 0; p < confusion.classes(); ++p) row.push_back(std::to_string(confusion.count(t, p)));
    out += format_csv_row(row) + "\n";
  }
  return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "Model,Accuracy,Precision,Recall,F1Score,ROC AUC\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += format_csv_row({r.model, format_double(m.accuracy), format_double(m.precision), format_double(m.recall),
                           format_double(m.f1), format_double(m.roc_auc)}) +
           "\n";
  }
  return out;
}

std::string resources_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "Model,Params,Training Time (s),Testing Time (s)\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    out += format_csv_row({r.model, std::to_string(r.metrics.params), opt(r.training_seconds), opt(r.testing_seconds)}) +
           "\n";
  }
  return out;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out = "labels: " + std::string(kLabelConvention) + "\n";
  out += pad("Model", width) + "  Accuracy  Precision  Recall  F1Score  ROC AUC\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += pad(r.model, width) + "  " + pad(fixed(m.accuracy, 4), 8) + "  " + pad(fixed(m.precision, 4), 9) + "  " +
           pad(fixed(m.recall, 4), 6) + "  " + pad(fixed(m.f1, 4), 7) + "  " + fixed(m.roc_auc, 4) + "\n";
  }
  out += "\n" + pad("Model", width) + "  Params     Training Time (s)  Testing Time (s)\n";
  for (const auto& r : rows) {
    out += pad(r.model, width) + "  " + pad(std::to_string(r.metrics.params), 9) + "  " +
           pad(r.training_seconds ? fixed(*r.training_seconds, 3) : "-", 17) + "  " +
           (r.testing_seconds ? fixed(*r.testing_seconds, 4) : "-") + "\n";
  }
  return out;
}

}  // namespace dtids
